#include "bwc/bp.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace bwc {

namespace {

// DFS postorder; throws on a cycle.
void topo_visit(const BranchingProgram& bp, int i, std::vector<int>& state,
                std::vector<int>& order) {
  state[i] = 1;
  for (const BpEdge& e : bp.nodes[i].edges) {
    if (state[e.target] == 1) throw Error("branching program has a cycle");
    if (state[e.target] == 0) topo_visit(bp, e.target, state, order);
  }
  state[i] = 2;
  order.push_back(i);
}

}  // namespace

void validate_bp(const BranchingProgram& bp) {
  std::unordered_set<std::string> ids;
  for (const BpNode& n : bp.nodes) {
    if (!ids.insert(n.id).second)
      throw Error("duplicate node id '" + n.id + "'");
    if (n.is_sink && !n.edges.empty())
      throw Error("sink '" + n.id + "' has outgoing edges");
    if (!n.is_sink && n.edges.empty())
      throw Error("inner node '" + n.id + "' has no outgoing edges");
    for (const BpEdge& e : n.edges)
      if (e.target < 0 || static_cast<size_t>(e.target) >= bp.nodes.size())
        throw Error("edge out of '" + n.id + "' targets an unknown node");
  }
  if (bp.start < 0 || static_cast<size_t>(bp.start) >= bp.nodes.size())
    throw Error("missing start node");

  std::set<std::string> declared(bp.actual_vars.begin(), bp.actual_vars.end());
  declared.insert(bp.guess_vars.begin(), bp.guess_vars.end());
  if (declared.size() != bp.actual_vars.size() + bp.guess_vars.size())
    throw Error("variable declared twice");
  for (const BpNode& n : bp.nodes)
    if (!n.is_sink && !declared.count(n.var))
      throw Error("node '" + n.id + "' reads undeclared variable '" + n.var +
                  "'");

  std::vector<int> state(bp.nodes.size(), 0), order;
  for (size_t i = 0; i < bp.nodes.size(); ++i)
    if (state[i] == 0) topo_visit(bp, static_cast<int>(i), state, order);

  // start must reach some sink
  std::vector<char> seen(bp.nodes.size(), 0);
  std::vector<int> stack{bp.start};
  seen[bp.start] = 1;
  bool hits_sink = false;
  while (!stack.empty() && !hits_sink) {
    int i = stack.back();
    stack.pop_back();
    if (bp.nodes[i].is_sink) hits_sink = true;
    for (const BpEdge& e : bp.nodes[i].edges)
      if (!seen[e.target]) {
        seen[e.target] = 1;
        stack.push_back(e.target);
      }
  }
  if (!hits_sink) throw Error("start node reaches no sink");
}

BranchingProgram parse_bp(const std::string& text) {
  struct Line {
    std::vector<std::string> toks;
    int no;
  };
  std::vector<Line> lines;
  {
    std::stringstream ss(text);
    std::string raw;
    int no = 0;
    while (std::getline(ss, raw)) {
      ++no;
      auto hash = raw.find('#');
      if (hash != std::string::npos) raw.resize(hash);
      std::stringstream ls(raw);
      Line l;
      l.no = no;
      std::string t;
      while (ls >> t) l.toks.push_back(t);
      if (!l.toks.empty()) lines.push_back(std::move(l));
    }
  }
  auto fail = [](const Line& l, const std::string& msg) -> void {
    throw ParseError(msg, l.no, 1);
  };

  BranchingProgram bp;
  std::unordered_map<std::string, int> index_of;
  // first pass: declarations
  for (const Line& l : lines) {
    const auto& t = l.toks;
    if (t[0] == "node" || t[0] == "sink") {
      if (t.size() != 3) fail(l, "malformed " + t[0] + " line");
      if (index_of.count(t[1])) fail(l, "duplicate node id '" + t[1] + "'");
      BpNode n;
      n.id = t[1];
      if (t[0] == "node") {
        n.var = t[2];
      } else {
        if (t[2] != "0" && t[2] != "1") fail(l, "sink value must be 0 or 1");
        n.is_sink = true;
        n.sink_value = t[2] == "1";
      }
      index_of[n.id] = static_cast<int>(bp.nodes.size());
      bp.nodes.push_back(std::move(n));
    } else if (t[0] != "start" && t[0] != "edge") {
      fail(l, "unrecognized line '" + t[0] + "'");
    }
  }
  // second pass: wiring
  bool have_start = false;
  auto resolve = [&](const Line& l, const std::string& id) -> int {
    auto it = index_of.find(id);
    if (it == index_of.end()) fail(l, "unknown node '" + id + "'");
    return it->second;
  };
  for (const Line& l : lines) {
    const auto& t = l.toks;
    if (t[0] == "start") {
      if (t.size() != 2) fail(l, "malformed start line");
      if (have_start) fail(l, "duplicate start line");
      bp.start = resolve(l, t[1]);
      have_start = true;
    } else if (t[0] == "edge") {
      if (t.size() != 4) fail(l, "malformed edge line");
      if (t[2] != "0" && t[2] != "1") fail(l, "edge label must be 0 or 1");
      int from = resolve(l, t[1]);
      if (bp.nodes[from].is_sink)
        fail(l, "edge out of sink '" + t[1] + "'");
      bp.nodes[from].edges.push_back({t[2] == "1", resolve(l, t[3])});
    }
  }
  if (!have_start) throw Error("missing start line");

  std::set<std::string> labels;
  for (const BpNode& n : bp.nodes)
    if (!n.is_sink) labels.insert(n.var);
  bp.actual_vars.assign(labels.begin(), labels.end());
  validate_bp(bp);
  return bp;
}

std::string serialize(const BranchingProgram& bp) {
  std::ostringstream out;
  out << "start " << bp.nodes[bp.start].id << "\n";
  for (const BpNode& n : bp.nodes) {
    if (n.is_sink)
      out << "sink " << n.id << " " << (n.sink_value ? 1 : 0) << "\n";
    else
      out << "node " << n.id << " " << n.var << "\n";
  }
  for (const BpNode& n : bp.nodes)
    for (const BpEdge& e : n.edges)
      out << "edge " << n.id << " " << (e.label ? 1 : 0) << " "
          << bp.nodes[e.target].id << "\n";
  return out.str();
}

namespace {

bool accepts_under(const BranchingProgram& bp,
                   const std::map<std::string, Bit>& total) {
  std::vector<char> seen(bp.nodes.size(), 0);
  std::vector<int> stack{bp.start};
  seen[bp.start] = 1;
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    const BpNode& n = bp.nodes[i];
    if (n.is_sink) {
      if (n.sink_value) return true;
      continue;
    }
    Bit want = total.at(n.var);
    for (const BpEdge& e : n.edges)
      if (e.label == want && !seen[e.target]) {
        seen[e.target] = 1;
        stack.push_back(e.target);
      }
  }
  return false;
}

}  // namespace

Bit bp_evaluate(const BranchingProgram& bp, const Assignment& a, BpMode mode,
                int unbound_cap) {
  std::set<std::string> vars(bp.actual_vars.begin(), bp.actual_vars.end());
  vars.insert(bp.guess_vars.begin(), bp.guess_vars.end());
  for (const BpNode& n : bp.nodes)
    if (!n.is_sink) vars.insert(n.var);
  for (const auto& [name, bit] : a.bindings) {
    (void)bit;
    if (!vars.count(name))
      throw Error("binding for unknown variable '" + name + "'");
  }
  for (const auto& v : bp.actual_vars)
    if (!a.has(v)) throw Error("actual variable '" + v + "' is unbound");

  if (mode == BpMode::Free) {
    std::vector<char> seen(bp.nodes.size(), 0);
    std::vector<int> stack{bp.start};
    seen[bp.start] = 1;
    while (!stack.empty()) {
      int i = stack.back();
      stack.pop_back();
      const BpNode& n = bp.nodes[i];
      if (n.is_sink) {
        if (n.sink_value) return 1;
        continue;
      }
      bool bound = a.has(n.var);
      Bit want = bound ? a.at(n.var) : 0;
      for (const BpEdge& e : n.edges)
        if ((!bound || e.label == want) && !seen[e.target]) {
          seen[e.target] = 1;
          stack.push_back(e.target);
        }
    }
    return 0;
  }

  std::vector<std::string> unbound;
  for (const auto& v : vars)
    if (!a.has(v)) unbound.push_back(v);
  if (unbound.size() > static_cast<size_t>(unbound_cap))
    throw Error("too many unbound variables (" +
                std::to_string(unbound.size()) + " > cap " +
                std::to_string(unbound_cap) + ")");
  size_t m = unbound.size();
  for (uint64_t mask = 0; mask < (uint64_t{1} << m); ++mask) {
    std::map<std::string, Bit> total = a.bindings;
    for (size_t j = 0; j < m; ++j)
      total[unbound[j]] = (mask >> (m - 1 - j)) & 1;
    if (accepts_under(bp, total)) return 1;
  }
  return 0;
}

std::map<std::string, int> max_read_counts(const BranchingProgram& bp) {
  // restrict to the part reachable from start
  std::vector<char> reach(bp.nodes.size(), 0);
  {
    std::vector<int> stack{bp.start};
    reach[bp.start] = 1;
    while (!stack.empty()) {
      int i = stack.back();
      stack.pop_back();
      for (const BpEdge& e : bp.nodes[i].edges)
        if (!reach[e.target]) {
          reach[e.target] = 1;
          stack.push_back(e.target);
        }
    }
  }
  std::vector<int> state(bp.nodes.size(), 0), order;
  for (size_t i = 0; i < bp.nodes.size(); ++i)
    if (reach[i] && state[i] == 0)
      topo_visit(bp, static_cast<int>(i), state, order);
  // order is a postorder: targets come before sources

  std::set<std::string> vars(bp.actual_vars.begin(), bp.actual_vars.end());
  vars.insert(bp.guess_vars.begin(), bp.guess_vars.end());
  for (const BpNode& n : bp.nodes)
    if (!n.is_sink) vars.insert(n.var);

  std::map<std::string, int> out;
  std::vector<int> dp(bp.nodes.size(), 0);
  for (const auto& v : vars) {
    for (int i : order) {
      int best = 0;
      for (const BpEdge& e : bp.nodes[i].edges)
        best = std::max(best, dp[e.target]);
      dp[i] = best + ((!bp.nodes[i].is_sink && bp.nodes[i].var == v) ? 1 : 0);
    }
    out[v] = dp[bp.start];
  }
  return out;
}

BpStats bp_stats(const BranchingProgram& bp, int k) {
  BpStats s;
  s.size = static_cast<int>(bp.nodes.size());
  s.reads = max_read_counts(bp);
  s.read_k = true;
  for (const auto& v : bp.actual_vars) {
    auto it = s.reads.find(v);
    if (it != s.reads.end() && it->second > k) s.read_k = false;
  }
  return s;
}

}  // namespace bwc
