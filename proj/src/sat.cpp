#include "bwc/sat.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <set>
#include <thread>

#include "bwc/conversions.hpp"

namespace bwc {

namespace {

std::vector<std::string> sorted_names(const std::vector<std::string>& v) {
  std::vector<std::string> s = v;
  std::sort(s.begin(), s.end());
  return s;
}

// first variable in name order = most significant bit
Assignment bind_mask(const std::vector<std::string>& vars,
                     std::uint64_t mask) {
  Assignment a;
  int n = (int)vars.size();
  for (int i = 0; i < n; ++i)
    a.bind(vars[i], (Bit)((mask >> (n - 1 - i)) & 1u));
  return a;
}

}  // namespace

SatResult brute_force_sat(const Circuit& c, const SatCaps& caps) {
  validate_circuit(c);
  int n = (int)c.actual_vars.size();
  int m = (int)c.guess_vars.size();
  if (n > caps.max_actuals)
    throw Error("too many inputs for exhaustive search: " +
                std::to_string(n));
  if (m > caps.max_guesses)
    throw Error("too many guess inputs: " + std::to_string(m));

  std::vector<std::string> vars = sorted_names(c.actual_vars);
  SatResult r;
  std::uint64_t total = 1ull << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    ++r.stats.assignments;
    Assignment a = bind_mask(vars, mask);
    if (auto wit = evaluate_nondet_witness(c, a, caps.max_guesses)) {
      for (auto& [k, v] : wit->bindings) a.bind(k, v);
      r.satisfiable = true;
      r.witness = std::move(a);
      return r;
    }
  }
  return r;
}

std::pair<std::vector<std::string>, int> choose_read_k_vars(
    const Circuit& c, double fraction) {
  validate_circuit(c);
  if (c.actual_vars.empty()) throw Error("no inputs to choose from");
  if (!(fraction > 0.0) || fraction > 1.0)
    throw Error("fraction must lie in (0, 1]");
  auto mult = read_multiplicities(c);
  std::vector<std::pair<int, std::string>> order;
  for (auto& [name, k] : mult) order.push_back({k, name});
  std::sort(order.begin(), order.end());
  int n = (int)order.size();
  int take = std::clamp((int)std::ceil(fraction * n), 1, n);
  std::vector<std::string> chosen;
  int k = 0;
  for (int i = 0; i < take; ++i) {
    chosen.push_back(order[i].second);
    k = std::max(k, order[i].first);
  }
  std::sort(chosen.begin(), chosen.end());
  return {chosen, k};
}

std::optional<Assignment> enumerating_backend(
    const BranchingProgram& bp, const std::vector<std::string>& free_vars) {
  std::vector<std::string> vars = sorted_names(free_vars);
  int n = (int)vars.size();
  if (n > 62) throw Error("too many free variables to enumerate");
  std::uint64_t total = 1ull << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    Assignment a = bind_mask(vars, mask);
    if (bp_evaluate(bp, a, BpMode::Strict)) return a;
  }
  return std::nullopt;
}

SatResult bounded_width_sat(const Circuit& c, const SatCaps& caps,
                            BpSatBackend backend, int jobs) {
  validate_circuit(c);
  if (!backend) backend = enumerating_backend;
  if (jobs < 1) jobs = 1;
  if ((int)c.guess_vars.size() > caps.max_guesses)
    throw Error("too many guess inputs: " +
                std::to_string(c.guess_vars.size()));

  SatResult r;
  int n = (int)c.actual_vars.size();
  if (n == 0) {
    ++r.stats.assignments;
    Assignment empty;
    if (auto wit = evaluate_nondet_witness(c, empty, caps.max_guesses)) {
      r.satisfiable = true;
      r.witness = std::move(*wit);
    }
    return r;
  }

  auto [chosen, k] = choose_read_k_vars(c, 0.5);
  r.stats.k = k;
  r.stats.chosen = chosen;

  std::set<std::string> chosen_set(chosen.begin(), chosen.end());
  std::vector<std::string> outer;
  for (auto& v : sorted_names(c.actual_vars))
    if (!chosen_set.count(v)) outer.push_back(v);
  if ((int)outer.size() > caps.max_actuals)
    throw Error("too many enumerated inputs: " +
                std::to_string(outer.size()));
  std::uint64_t total = 1ull << outer.size();

  // Decides one outer assignment; fills `full` with every variable
  // bound on success.
  auto try_mask = [&](std::uint64_t mask, Assignment* full,
                      long long* convs) -> bool {
    Assignment part = bind_mask(outer, mask);
    Circuit rc = restrict_circuit(c, part);
    std::optional<Assignment> inner;
    if (rc.nodes[rc.output].kind == NodeKind::Const) {
      if (!rc.nodes[rc.output].value) return false;
      Assignment z;  // constant true: any chosen assignment will do
      for (auto& v : chosen) z.bind(v, 0);
      inner = std::move(z);
    } else {
      BpConversion conv = circuit_to_bp(layer(rc), caps.max_width);
      if (convs) ++*convs;
      inner = backend(conv.bp, rc.actual_vars);
    }
    if (!inner) return false;
    Assignment a = part;
    for (auto& [key, val] : inner->bindings) a.bind(key, val);
    auto wit = evaluate_nondet_witness(c, a, caps.max_guesses);
    if (!wit)
      throw Error("internal: backend witness fails on the source circuit");
    for (auto& [key, val] : wit->bindings) a.bind(key, val);
    *full = std::move(a);
    return true;
  };

  if (jobs == 1 || total <= (std::uint64_t)jobs) {
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      ++r.stats.assignments;
      Assignment full;
      if (try_mask(mask, &full, &r.stats.conversions)) {
        r.satisfiable = true;
        r.witness = std::move(full);
        return r;
      }
    }
    return r;
  }

  // Parallel outer enumeration: workers stride over the masks and stop
  // once anything below their position has succeeded; the lowest
  // satisfying mask wins, which is exactly the sequential answer. The
  // stats are then re-derived for that mask so they match a jobs=1 run.
  std::atomic<std::uint64_t> best(total);
  std::atomic<long long> conv_total(0);
  std::vector<std::optional<Assignment>> found(jobs);
  std::vector<std::uint64_t> found_mask(jobs, total);
  std::vector<std::string> errors(jobs);
  std::vector<std::thread> workers;
  for (int wk = 0; wk < jobs; ++wk) {
    workers.emplace_back([&, wk]() {
      long long local = 0;
      try {
        for (std::uint64_t mask = (std::uint64_t)wk; mask < total;
             mask += (std::uint64_t)jobs) {
          if (mask >= best.load(std::memory_order_relaxed)) break;
          Assignment full;
          if (try_mask(mask, &full, &local)) {
            found[wk] = std::move(full);
            found_mask[wk] = mask;
            std::uint64_t cur = best.load();
            while (mask < cur && !best.compare_exchange_weak(cur, mask)) {
            }
            break;
          }
        }
      } catch (const std::exception& e) {
        errors[wk] = e.what();
      }
      conv_total.fetch_add(local);
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors)
    if (!e.empty()) throw Error(e);

  std::uint64_t win = total;
  int winner = -1;
  for (int i = 0; i < jobs; ++i)
    if (found[i] && found_mask[i] < win) {
      win = found_mask[i];
      winner = i;
    }

  if (winner < 0) {
    r.stats.assignments = (long long)total;
    r.stats.conversions = conv_total.load();
    return r;
  }
  auto needs_conversion = [&](std::uint64_t mask) {
    Circuit rc = restrict_circuit(c, bind_mask(outer, mask));
    return rc.nodes[rc.output].kind != NodeKind::Const;
  };
  r.stats.assignments = (long long)win + 1;
  r.stats.conversions = 0;
  for (std::uint64_t mask = 0; mask <= win; ++mask)
    if (needs_conversion(mask)) ++r.stats.conversions;
  r.satisfiable = true;
  r.witness = std::move(*found[winner]);
  return r;
}

}  // namespace bwc
