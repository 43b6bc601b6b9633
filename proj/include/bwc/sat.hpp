#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bwc/bp.hpp"
#include "bwc/circuit.hpp"

namespace bwc {

// Enumeration budgets. Exceeding one throws; nothing is silently
// truncated.
struct SatCaps {
  int max_actuals = 22;  // enumerated actual inputs
  int max_guesses = 20;  // guess inputs resolved per assignment
  int max_width = 12;    // layered width accepted by the conversion
};

struct SatStats {
  long long assignments = 0;  // outer assignments examined
  long long conversions = 0;  // branching-program builds
  int k = 0;                  // read bound of the chosen variables
  std::vector<std::string> chosen;  // chosen set, name order

  bool operator==(const SatStats&) const = default;
};

struct SatResult {
  bool satisfiable = false;
  std::optional<Assignment> witness;  // actuals and guesses together
  SatStats stats;
};

// Exhaustive search over the actual inputs in name order (first name =
// most significant bit), existential over the guesses.
SatResult brute_force_sat(const Circuit& c, const SatCaps& caps = {});

// The ceil(fraction * n) actual variables of lowest read multiplicity,
// ties by name. Returns the set in name order together with the largest
// multiplicity among them; for fraction 1/2 that bound is at most
// ceil(2 * total reads / n) by averaging.
std::pair<std::vector<std::string>, int> choose_read_k_vars(
    const Circuit& c, double fraction = 0.5);

// Decides a branching program on the given free variables, producing a
// binding of them when satisfiable. The seam exists so tests can
// substitute an instrumented solver. With jobs > 1 the backend runs
// concurrently and must be reentrant.
using BpSatBackend = std::function<std::optional<Assignment>(
    const BranchingProgram&, const std::vector<std::string>&)>;

// Reference backend: lexicographic enumeration of the free variables,
// guesses resolved by the strict evaluator.
std::optional<Assignment> enumerating_backend(
    const BranchingProgram& bp, const std::vector<std::string>& free_vars);

// Restriction-based search. The variables outside the chosen set are
// enumerated lexicographically; each restricted circuit is layered,
// converted to a branching program and handed to the backend, skipping
// restrictions that fold to a constant. `jobs` parallelizes the outer
// enumeration; the returned SatResult is identical to a single-threaded
// run.
SatResult bounded_width_sat(const Circuit& c, const SatCaps& caps = {},
                            BpSatBackend backend = {}, int jobs = 1);

}  // namespace bwc
