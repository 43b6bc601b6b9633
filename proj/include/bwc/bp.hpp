#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bwc/circuit.hpp"

// Nondeterministic branching programs. Inner nodes read a variable and
// branch on its value; several outgoing edges may carry the same label
// (nondeterminism), and a missing label rejects along that path. The
// program accepts when some consistent start-to-sink path reaches a
// 1-sink.
//
// Text format:
//   start ID
//   node ID VAR
//   edge FROM 0|1 TO
//   sink ID 0|1

namespace bwc {

struct BpEdge {
  Bit label;
  int target;  // index into BranchingProgram::nodes
  bool operator==(const BpEdge&) const = default;
};

struct BpNode {
  std::string id;
  bool is_sink = false;
  std::string var;  // inner nodes
  Bit sink_value = 0;
  std::vector<BpEdge> edges;
  bool operator==(const BpNode&) const = default;
};

struct BranchingProgram {
  std::vector<BpNode> nodes;
  int start = -1;
  // The file format does not record the split, so parsed programs
  // default every label to an actual variable; conversions fill both.
  std::vector<std::string> actual_vars;
  std::vector<std::string> guess_vars;

  bool operator==(const BranchingProgram&) const = default;
};

// Acyclicity, sink out-degree 0, inner out-degree >= 1, start present
// and reaching a sink, labels covered by the variable lists.
void validate_bp(const BranchingProgram& bp);

BranchingProgram parse_bp(const std::string& text);
std::string serialize(const BranchingProgram& bp);

enum class BpMode { Strict, Free };

// `a` binds the actual variables. Strict mode enumerates all settings of
// the unbound variables (guesses and any unbound labels, at most 2^cap)
// and asks for a consistent accepting path. Free mode lets every edge
// labeled by an unbound variable be taken unconstrained; the two agree
// when no path reads an unbound variable twice.
Bit bp_evaluate(const BranchingProgram& bp, const Assignment& a, BpMode mode,
                int unbound_cap = 20);

// For each variable, the maximum number of inner nodes labeled by it on
// any path from the start node. Computed over the part of the program
// reachable from start.
std::map<std::string, int> max_read_counts(const BranchingProgram& bp);

struct BpStats {
  int size = 0;  // all nodes, sinks included
  std::map<std::string, int> reads;
  bool read_k = false;  // every actual variable read at most k times
};

// Size, per-variable max path read counts, and the read-k verdict for
// the given k (audited over actual variables only; guesses are exempt).
BpStats bp_stats(const BranchingProgram& bp, int k);

}  // namespace bwc
