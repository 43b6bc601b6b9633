#include "bwc/conversions.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace bwc {

namespace {

Bit apply_gate(NodeKind k, Bit a, Bit b) {
  switch (k) {
    case NodeKind::And:
      return a && b;
    case NodeKind::Or:
      return a || b;
    case NodeKind::Not:
      return !a;
    case NodeKind::Copy:
      return a;
    default:
      throw Error("not a gate kind");
  }
}

}  // namespace

std::string ConversionReport::bound_text() const {
  std::string t;
  if (size_bound >= 0) t += "size<=" + std::to_string(size_bound);
  if (width_bound >= 0) {
    if (!t.empty()) t += ";";
    t += "width<=" + std::to_string(width_bound);
  }
  if (t.empty()) t = "none";
  return t;
}

std::string ConversionReport::to_text() const {
  std::ostringstream os;
  os << "s=" << in_size << "\n"
     << "w=" << in_width << "\n"
     << "n=" << in_actuals << "\n"
     << "m=" << in_guesses << "\n"
     << "out_size=" << out_size << "\n"
     << "out_width=" << out_width << "\n"
     << "bound=" << bound_text() << "\n"
     << "ok=" << (ok ? 1 : 0) << "\n";
  return os.str();
}

namespace {

// A value available during the left-to-right walk: either a constant or
// the bit of an original node currently held in the window.
struct WireSrc {
  bool is_const = false;
  Bit bit = 0;
  int node = -1;
};

struct BpStep {
  enum Kind { Read, Gate, Drop } kind;
  int node = -1;
  NodeKind op = NodeKind::Copy;
  WireSrc a, b;
};

}  // namespace

BpConversion circuit_to_bp(const LayeredCircuit& lc, int width_cap) {
  validate_layered(lc);
  const Circuit& c = lc.base;
  int w = width(lc);
  int cap = std::min(width_cap, 25);
  if (w > cap)
    throw Error("circuit width " + std::to_string(w) +
                " exceeds the conversion cap " + std::to_string(cap));

  // nodes on a path to the output
  std::vector<char> live(c.nodes.size(), 0);
  {
    std::vector<int> stack = {c.output};
    live[c.output] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      const Node& n = c.nodes[u];
      for (int op : {n.lhs, n.rhs})
        if (op >= 0 && !live[op]) {
          live[op] = 1;
          stack.push_back(op);
        }
    }
  }

  std::vector<int> layer_of(c.nodes.size(), 0);
  for (size_t t = 0; t < lc.layers.size(); ++t)
    for (int g : lc.layers[t]) layer_of[g] = (int)t + 1;

  const Node& out_node = c.nodes[c.output];
  int T = is_gate(out_node.kind) ? layer_of[c.output] : 0;

  // Plan the walk first. Each transition reads the input and guess
  // nodes it touches (once each), folds the layer's live gates into the
  // window, and drops every value after its last use in the transition.
  std::vector<BpStep> script;
  long long reads = 0;
  std::set<int> held;
  auto make_src = [&](int op) -> WireSrc {
    const Node& n = c.nodes[op];
    if (n.kind == NodeKind::Const) return {true, n.value, -1};
    if (n.kind == NodeKind::Input || n.kind == NodeKind::Guess) {
      if (!held.count(op)) {
        script.push_back({BpStep::Read, op, NodeKind::Copy, {}, {}});
        ++reads;
        held.insert(op);
      }
      return {false, 0, op};
    }
    if (!held.count(op)) throw Error("internal: operand value not held");
    return {false, 0, op};
  };
  for (int t = 1; t <= T; ++t) {
    std::map<int, int> uses;
    std::vector<int> order;
    for (int g : lc.layers[t - 1]) {
      if (!live[g]) continue;
      order.push_back(g);
      const Node& n = c.nodes[g];
      for (int op : {n.lhs, n.rhs})
        if (op >= 0 && c.nodes[op].kind != NodeKind::Const) ++uses[op];
    }
    for (int g : order) {
      const Node& n = c.nodes[g];
      WireSrc a = make_src(n.lhs);
      WireSrc b = n.rhs >= 0 ? make_src(n.rhs) : WireSrc{};
      script.push_back({BpStep::Gate, g, n.kind, a, b});
      held.insert(g);
      for (int op : {n.lhs, n.rhs}) {
        if (op < 0 || c.nodes[op].kind == NodeKind::Const) continue;
        if (--uses[op] == 0) {
          script.push_back({BpStep::Drop, op, NodeKind::Copy, {}, {}});
          held.erase(op);
        }
      }
    }
  }
  WireSrc out_src;
  if (out_node.kind == NodeKind::Const) {
    out_src = {true, out_node.value, -1};
  } else if (!is_gate(out_node.kind)) {
    script.push_back({BpStep::Read, c.output, NodeKind::Copy, {}, {}});
    ++reads;
    out_src = {false, 0, c.output};
  } else {
    out_src = {false, 0, c.output};
  }

  // Execute the plan over every reachable window valuation at once.
  struct Pending {
    std::vector<std::pair<int, Bit>> incoming;  // (from node, edge label)
    bool is_start = false;
  };

  BranchingProgram bp;
  bp.actual_vars = c.actual_vars;
  bp.guess_vars = c.guess_vars;

  std::map<std::uint64_t, Pending> frontier;
  frontier[0].is_start = true;

  std::vector<int> window;                 // original node per bit position
  std::unordered_map<int, int> bit_pos;
  long long max_level = 0;
  long long node_seq = 0;

  auto src_val = [&](const WireSrc& s, std::uint64_t mask) -> Bit {
    if (s.is_const) return s.bit;
    return (mask >> bit_pos.at(s.node)) & 1u;
  };
  const std::uint64_t state_cap = 1ull << std::min(2 * w, 62);

  for (const BpStep& st : script) {
    if (st.kind == BpStep::Read) {
      if ((std::uint64_t)frontier.size() > state_cap)
        throw Error("internal: window state count exceeds its bound");
      max_level = std::max<long long>(max_level, (long long)frontier.size());
      int newpos = (int)window.size();
      if (newpos >= 62) throw Error("internal: window overflow");
      const std::string& var = c.nodes[st.node].var;
      std::map<std::uint64_t, Pending> next;
      for (auto& [mask, pend] : frontier) {
        int idx = (int)bp.nodes.size();
        BpNode bn;
        bn.id = "b" + std::to_string(node_seq++);
        bn.var = var;
        bp.nodes.push_back(std::move(bn));
        if (pend.is_start) bp.start = idx;
        for (auto& [from, lab] : pend.incoming)
          bp.nodes[from].edges.push_back({lab, idx});
        for (int b = 0; b <= 1; ++b)
          next[mask | (std::uint64_t(b) << newpos)].incoming.push_back(
              {idx, (Bit)b});
      }
      frontier = std::move(next);
      bit_pos[st.node] = newpos;
      window.push_back(st.node);
    } else if (st.kind == BpStep::Gate) {
      int newpos = (int)window.size();
      if (newpos >= 62) throw Error("internal: window overflow");
      std::map<std::uint64_t, Pending> next;
      for (auto& [mask, pend] : frontier) {
        Bit av = src_val(st.a, mask);
        Bit bv = (st.op == NodeKind::And || st.op == NodeKind::Or)
                     ? src_val(st.b, mask)
                     : 0;
        Bit r = apply_gate(st.op, av, bv);
        next.emplace(mask | (std::uint64_t(r) << newpos), std::move(pend));
      }
      frontier = std::move(next);
      bit_pos[st.node] = newpos;
      window.push_back(st.node);
    } else {
      int p = bit_pos.at(st.node);
      std::map<std::uint64_t, Pending> next;
      for (auto& [mask, pend] : frontier) {
        std::uint64_t low = mask & ((1ull << p) - 1);
        std::uint64_t high = (mask >> (p + 1)) << p;
        Pending& dst = next[low | high];
        dst.is_start |= pend.is_start;
        dst.incoming.insert(dst.incoming.end(), pend.incoming.begin(),
                            pend.incoming.end());
      }
      frontier = std::move(next);
      bit_pos.erase(st.node);
      window.erase(window.begin() + p);
      for (auto& [node, pos] : bit_pos)
        if (pos > p) --pos;
    }
  }

  if (reads > 0) {
    int sink_idx[2];
    for (int v = 0; v <= 1; ++v) {
      BpNode s;
      s.id = "s" + std::to_string(v);
      s.is_sink = true;
      s.sink_value = (Bit)v;
      sink_idx[v] = (int)bp.nodes.size();
      bp.nodes.push_back(std::move(s));
    }
    for (auto& [mask, pend] : frontier) {
      int sk = sink_idx[src_val(out_src, mask)];
      if (pend.is_start) bp.start = sk;
      for (auto& [from, lab] : pend.incoming)
        bp.nodes[from].edges.push_back({lab, sk});
    }
  } else {
    if (frontier.size() != 1)
      throw Error("internal: readless program with several states");
    auto& [mask, pend] = *frontier.begin();
    Bit r = src_val(out_src, mask);
    BpNode s;
    s.id = "s" + std::to_string((int)r);
    s.is_sink = true;
    s.sink_value = r;
    bp.start = (int)bp.nodes.size();
    bp.nodes.push_back(std::move(s));
  }
  validate_bp(bp);

  BpConversion out;
  out.bp = std::move(bp);
  ConversionReport& rep = out.report;
  rep.in_size = c.size();
  rep.in_width = w;
  rep.in_actuals = (long long)c.actual_vars.size();
  rep.in_guesses = (long long)c.guess_vars.size();
  rep.out_size = (long long)out.bp.nodes.size();
  rep.out_width = max_level;
  long long pw = 1;
  for (int i = 0; i < w; ++i) pw *= 4;
  rep.size_bound = pw * (reads + 1) + 2;
  rep.width_bound = -1;
  rep.ok = rep.out_size <= rep.size_bound;
  if (!rep.ok)
    throw Error("internal: converted program exceeds its size bound");
  return out;
}

PebbleGraph pebble_graph_of(const Circuit& c) {
  validate_circuit(c);
  PebbleGraph g;
  for (const Node& n : c.nodes) g.vertices.push_back(n.id);
  for (size_t i = 0; i < c.nodes.size(); ++i) {
    const Node& n = c.nodes[i];
    std::set<int> ops;
    for (int op : {n.lhs, n.rhs})
      if (op >= 0) ops.insert(op);
    for (int op : ops) g.edges.push_back({op, (int)i});
  }
  g.sink = c.output;
  validate_graph(g);
  return g;
}

namespace {

// Grows a layered circuit one layer at a time; carried values are
// relayed by COPY gates, input/const/guess nodes stay outside layers.
struct LayerBuild {
  Circuit nc;
  std::vector<std::vector<int>> layers;
  std::unordered_set<std::string> used_ids;
  int id_seq = 0;
  int copy_seq = 0;

  std::string fresh_id(const std::string& base) {
    std::string id = base;
    while (used_ids.count(id)) id = base + "_" + std::to_string(++id_seq);
    used_ids.insert(id);
    return id;
  }

  int add_free(Node n) {
    n.id = fresh_id(n.id);
    nc.nodes.push_back(std::move(n));
    return (int)nc.nodes.size() - 1;
  }

  void open_layer() { layers.emplace_back(); }

  int add_gate(Node n) {
    n.id = fresh_id(n.id);
    nc.nodes.push_back(std::move(n));
    int idx = (int)nc.nodes.size() - 1;
    layers.back().push_back(idx);
    return idx;
  }

  int add_copy(int src) {
    Node n;
    n.id = "c" + std::to_string(++copy_seq);
    n.kind = NodeKind::Copy;
    n.lhs = src;
    return add_gate(std::move(n));
  }

  // relay every still-held gate value into the current layer
  void refresh(std::map<int, int>& carried, int skip_vertex) {
    for (auto& [v, ref] : carried) {
      if (v == skip_vertex) continue;
      if (is_gate(nc.nodes[ref].kind)) ref = add_copy(ref);
    }
  }
};

std::string violation_text(const Violation& v) {
  return "invalid pebbling: move " + std::to_string(v.move_index) +
         " breaks rule " + std::to_string(v.rule) + ": " + v.message;
}

}  // namespace

CircuitConversion black_pebbling_to_circuit(const Circuit& c,
                                            const Pebbling& p) {
  validate_circuit(c);
  if (!c.guess_vars.empty())
    throw Error("pebbling compilation expects a deterministic circuit");
  PebbleGraph g = pebble_graph_of(c);
  if (auto v = validate_pebbling(g, p, PebbleMode::Black))
    throw Error(violation_text(*v));
  Measures m = measures(p);

  LayerBuild b;
  b.nc.actual_vars = c.actual_vars;

  std::map<int, int> carried;  // pebbled vertex -> node holding its value
  long long placements = 0;
  for (const Move& mv : p.moves) {
    b.open_layer();
    int placed = -1;
    if (mv.kind == MoveKind::RemoveBlack) {
      carried.erase(mv.vertex);
    } else {
      ++placements;
      const Node& orig = c.nodes[mv.vertex];
      Node n;
      n.id = orig.id;
      n.kind = orig.kind;
      if (orig.kind == NodeKind::Input) {
        n.var = orig.var;
        carried[mv.vertex] = b.add_free(std::move(n));
      } else if (orig.kind == NodeKind::Const) {
        n.value = orig.value;
        carried[mv.vertex] = b.add_free(std::move(n));
      } else {
        n.lhs = carried.at(orig.lhs);
        n.rhs = orig.rhs >= 0 ? carried.at(orig.rhs) : -1;
        carried[mv.vertex] = b.add_gate(std::move(n));
      }
      placed = mv.vertex;
    }
    b.refresh(carried, placed);
  }

  LayeredCircuit lc;
  lc.base = std::move(b.nc);
  lc.base.output = carried.at(g.sink);
  lc.layers = std::move(b.layers);
  validate_layered(lc);

  ConversionReport rep;
  rep.in_size = c.size();
  rep.in_width = width(layer(c));
  rep.in_actuals = (long long)c.actual_vars.size();
  rep.in_guesses = 0;
  rep.out_size = lc.base.size();
  rep.out_width = width(lc);
  rep.size_bound = m.time;
  rep.width_bound = m.space;
  rep.ok = rep.out_size <= rep.size_bound && rep.out_width <= rep.width_bound;
  if (!rep.ok) throw Error("internal: compiled circuit exceeds its bounds");
  (void)placements;
  return {std::move(lc), rep};
}

BwConversion bw_pebbling_to_circuit(const Circuit& c, const Pebbling& p) {
  validate_circuit(c);
  if (!c.guess_vars.empty())
    throw Error("pebbling compilation expects a deterministic circuit");
  PebbleGraph g = pebble_graph_of(c);
  if (auto v = validate_pebbling(g, p, PebbleMode::BlackWhite))
    throw Error(violation_text(*v));
  Measures m = measures(p);

  LayerBuild b;
  b.nc.actual_vars = c.actual_vars;

  BwConversion out;
  std::map<int, int> carried;
  std::set<std::string> var_names(c.actual_vars.begin(), c.actual_vars.end());
  int guess_seq = 0;
  int tmp_seq = 0;
  int vd_seq = 0;

  // the running conjunction of guess checks; constant 1 until the first
  // white pebble comes off
  Node one;
  one.id = "one";
  one.kind = NodeKind::Const;
  one.value = 1;
  int validity = b.add_free(std::move(one));

  // one gate per layer; everything still pebbled rides along as COPYs
  auto gadget_layer = [&](Node n, bool replaces_validity) -> int {
    b.open_layer();
    int idx = b.add_gate(std::move(n));
    b.refresh(carried, -1);
    if (replaces_validity)
      validity = idx;
    else if (is_gate(b.nc.nodes[validity].kind))
      validity = b.add_copy(validity);
    return idx;
  };
  auto not_of = [&](int src) {
    Node n;
    n.id = "t" + std::to_string(++tmp_seq);
    n.kind = NodeKind::Not;
    n.lhs = src;
    return gadget_layer(std::move(n), false);
  };
  auto and_of = [&](int x, int y, bool replaces_validity) {
    Node n;
    n.id = replaces_validity ? "vd" + std::to_string(++vd_seq)
                             : "t" + std::to_string(++tmp_seq);
    n.kind = NodeKind::And;
    n.lhs = x;
    n.rhs = y;
    return gadget_layer(std::move(n), replaces_validity);
  };
  auto or_of = [&](int x, int y) {
    Node n;
    n.id = "t" + std::to_string(++tmp_seq);
    n.kind = NodeKind::Or;
    n.lhs = x;
    n.rhs = y;
    return gadget_layer(std::move(n), false);
  };

  for (const Move& mv : p.moves) {
    const Node& orig = c.nodes[mv.vertex];
    if (mv.kind == MoveKind::PlaceBlack) {
      b.open_layer();
      Node n;
      n.id = orig.id;
      n.kind = orig.kind;
      if (orig.kind == NodeKind::Input) {
        n.var = orig.var;
        carried[mv.vertex] = b.add_free(std::move(n));
      } else if (orig.kind == NodeKind::Const) {
        n.value = orig.value;
        carried[mv.vertex] = b.add_free(std::move(n));
      } else {
        n.lhs = carried.at(orig.lhs);
        n.rhs = orig.rhs >= 0 ? carried.at(orig.rhs) : -1;
        carried[mv.vertex] = b.add_gate(std::move(n));
      }
      b.refresh(carried, mv.vertex);
      if (is_gate(b.nc.nodes[validity].kind)) validity = b.add_copy(validity);
    } else if (mv.kind == MoveKind::RemoveBlack) {
      b.open_layer();
      carried.erase(mv.vertex);
      b.refresh(carried, -1);
      if (is_gate(b.nc.nodes[validity].kind)) validity = b.add_copy(validity);
    } else if (mv.kind == MoveKind::PlaceWhite) {
      b.open_layer();
      std::string var;
      do {
        var = "g" + std::to_string(++guess_seq);
      } while (var_names.count(var));
      var_names.insert(var);
      Node n;
      n.id = var;
      n.kind = NodeKind::Guess;
      n.var = var;
      carried[mv.vertex] = b.add_free(std::move(n));
      b.nc.guess_vars.push_back(var);
      out.guesses.push_back({var, orig.id});
      b.refresh(carried, mv.vertex);
      if (is_gate(b.nc.nodes[validity].kind)) validity = b.add_copy(validity);
    } else {
      // removing a white pebble: append the check that the guess equals
      // the value recomputed from the still-pebbled predecessors
      int gv = carried.at(mv.vertex);
      carried.erase(mv.vertex);

      int val_free = -1;
      if (orig.kind == NodeKind::Input) {
        Node n;
        n.id = orig.id;
        n.kind = NodeKind::Input;
        n.var = orig.var;
        val_free = b.add_free(std::move(n));
      } else if (orig.kind == NodeKind::Const) {
        Node n;
        n.id = orig.id;
        n.kind = NodeKind::Const;
        n.value = orig.value;
        val_free = b.add_free(std::move(n));
      }
      auto recompute = [&]() -> int {
        if (val_free >= 0) return val_free;
        Node n;
        n.id = orig.id;
        n.kind = orig.kind;
        n.lhs = carried.at(orig.lhs);
        n.rhs = orig.rhs >= 0 ? carried.at(orig.rhs) : -1;
        return gadget_layer(std::move(n), false);
      };

      // validity &= (value OR NOT guess), as NOT(AND(NOT value, guess))
      int nv = not_of(recompute());
      int d = and_of(nv, gv, false);
      int cpos = not_of(d);
      and_of(validity, cpos, true);
      // validity &= (NOT value OR guess)
      int nv2 = not_of(recompute());
      int cneg = or_of(nv2, gv);
      and_of(validity, cneg, true);
    }
  }

  // a wrong guess anywhere forces the output to 0
  b.open_layer();
  Node fin;
  fin.id = "out";
  fin.kind = NodeKind::And;
  fin.lhs = carried.at(g.sink);
  fin.rhs = validity;
  int out_idx = b.add_gate(std::move(fin));

  LayeredCircuit lc;
  lc.base = std::move(b.nc);
  lc.base.output = out_idx;
  lc.layers = std::move(b.layers);
  validate_layered(lc);

  ConversionReport& rep = out.report;
  rep.in_size = c.size();
  rep.in_width = width(layer(c));
  rep.in_actuals = (long long)c.actual_vars.size();
  rep.in_guesses = 0;
  rep.out_size = lc.base.size();
  rep.out_width = width(lc);
  rep.size_bound = 6ll * m.time;
  rep.width_bound = m.space + 1;
  rep.ok = rep.out_size <= rep.size_bound && rep.out_width <= rep.width_bound;
  if (!rep.ok) throw Error("internal: compiled circuit exceeds its bounds");
  out.circuit = std::move(lc);
  return out;
}

std::vector<std::pair<std::string, std::string>> valiant_cut(
    const Circuit& c, int target_depth) {
  validate_circuit(c);
  if (target_depth < 1) throw Error("target depth must be at least 1");

  std::vector<std::pair<int, int>> all;
  for (size_t i = 0; i < c.nodes.size(); ++i) {
    const Node& n = c.nodes[i];
    if (!is_gate(n.kind)) continue;
    std::set<int> ops;
    for (int op : {n.lhs, n.rhs})
      if (op >= 0 && is_gate(c.nodes[op].kind)) ops.insert(op);
    for (int op : ops) all.push_back({op, (int)i});
  }

  std::set<std::pair<int, int>> cut;
  while (true) {
    // depth labels ignoring removed edges
    std::vector<long long> d(c.nodes.size(), 0);
    long long dmax = 0;
    for (size_t i = 0; i < c.nodes.size(); ++i) {
      const Node& n = c.nodes[i];
      if (!is_gate(n.kind)) continue;
      long long best = 0;
      for (int op : {n.lhs, n.rhs})
        if (op >= 0 && is_gate(c.nodes[op].kind) &&
            !cut.count({op, (int)i}))
          best = std::max(best, d[op]);
      d[i] = 1 + best;
      dmax = std::max(dmax, d[i]);
    }
    if (dmax <= target_depth) break;

    // classify survivors by the top bit at which the labels differ;
    // remove the smallest class, low bit position winning ties
    std::map<int, std::vector<std::pair<int, int>>> classes;
    for (auto& e : all) {
      if (cut.count(e)) continue;
      auto x = (unsigned long long)(d[e.first] ^ d[e.second]);
      classes[std::bit_width(x) - 1].push_back(e);
    }
    if (classes.empty())
      throw Error("internal: depth above target with no edges left");
    int best_cls = -1;
    size_t best_n = (size_t)-1;
    for (auto& [cls, es] : classes)
      if (es.size() < best_n) {
        best_n = es.size();
        best_cls = cls;
      }
    for (auto& e : classes[best_cls]) cut.insert(e);
  }

  std::vector<std::pair<std::string, std::string>> out;
  for (auto& e : cut)
    out.push_back({c.nodes[e.first].id, c.nodes[e.second].id});
  return out;
}

CircuitConversion cut_to_bounded_width(
    const Circuit& c,
    const std::vector<std::pair<std::string, std::string>>& cut) {
  validate_circuit(c);

  std::unordered_map<std::string, int> by_id;
  for (size_t i = 0; i < c.nodes.size(); ++i) by_id[c.nodes[i].id] = (int)i;

  std::set<std::pair<int, int>> cutset;
  for (auto& [uid, vid] : cut) {
    auto ui = by_id.find(uid);
    auto vi = by_id.find(vid);
    if (ui == by_id.end() || vi == by_id.end())
      throw Error("cut edge references unknown node: " + uid + " -> " + vid);
    int u = ui->second;
    int v = vi->second;
    const Node& vn = c.nodes[v];
    if (!is_gate(c.nodes[u].kind) || !is_gate(vn.kind) ||
        (vn.lhs != u && vn.rhs != u))
      throw Error("cut pair is not a gate-to-gate edge: " + uid + " -> " +
                  vid);
    cutset.insert({u, v});
  }

  std::vector<int> sources;
  {
    std::set<int> s;
    for (auto& e : cutset) s.insert(e.first);
    sources.assign(s.begin(), s.end());  // ascending index = topological
  }

  LayerBuild b;
  b.nc.actual_vars = c.actual_vars;
  b.nc.guess_vars = c.guess_vars;

  std::map<int, int> bank;                // cut source -> current relay ref
  std::unordered_map<int, int> free_ref;  // shared input/const/guess nodes
  auto free_node = [&](int u) {
    auto it = free_ref.find(u);
    if (it != free_ref.end()) return it->second;
    const Node& n = c.nodes[u];
    Node nn;
    nn.id = n.id;
    nn.kind = n.kind;
    nn.var = n.var;
    nn.value = n.value;
    int idx = b.add_free(std::move(nn));
    free_ref[u] = idx;
    return idx;
  };

  long long max_block_width = 0;

  // splice in the cut-free cone of root as a stack of fresh layers and
  // return the ref of its recomputed value (in the last layer built)
  auto build_block = [&](int root) -> int {
    std::set<int> cone = {root};
    std::vector<int> stack = {root};
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      const Node& n = c.nodes[u];
      for (int op : {n.lhs, n.rhs}) {
        if (op < 0 || cutset.count({op, u})) continue;
        if (is_gate(c.nodes[op].kind) && cone.insert(op).second)
          stack.push_back(op);
      }
    }

    std::map<int, int> cdepth;
    std::map<int, std::vector<int>> at_depth;
    for (int u : cone) {
      const Node& n = c.nodes[u];
      int best = 0;
      for (int op : {n.lhs, n.rhs})
        if (op >= 0 && !cutset.count({op, u}) && cone.count(op))
          best = std::max(best, cdepth.at(op));
      cdepth[u] = 1 + best;
      at_depth[cdepth[u]].push_back(u);
    }
    std::map<int, int> duse;
    for (int u : cone) {
      const Node& n = c.nodes[u];
      for (int op : {n.lhs, n.rhs})
        if (op >= 0 && !cutset.count({op, u}) && cone.count(op))
          duse[op] = std::max(duse[op], cdepth.at(u));
    }

    std::map<int, int> cur;  // cone gate -> ref valid at the last layer
    int cd = cdepth.at(root);
    for (int l = 1; l <= cd; ++l) {
      b.open_layer();
      std::map<int, int> next;
      auto dit = at_depth.find(l);
      if (dit != at_depth.end()) {
        for (int u : dit->second) {
          const Node& n = c.nodes[u];
          auto operand = [&](int op) -> int {
            if (op < 0) return -1;
            if (cutset.count({op, u})) return bank.at(op);
            if (!is_gate(c.nodes[op].kind)) return free_node(op);
            return cur.at(op);
          };
          Node nn;
          nn.id = n.id;
          nn.kind = n.kind;
          nn.lhs = operand(n.lhs);
          nn.rhs = operand(n.rhs);
          next[u] = b.add_gate(std::move(nn));
        }
      }
      for (auto& [u, r] : cur)
        if (duse[u] > l) next[u] = b.add_copy(r);
      long long block_w = (long long)b.layers.back().size();
      for (auto& [ov, br] : bank) br = b.add_copy(br);
      max_block_width = std::max(max_block_width, block_w);
      cur = std::move(next);
    }
    return cur.at(root);
  };

  for (int s : sources) bank[s] = build_block(s);

  int out_ref;
  const Node& on = c.nodes[c.output];
  if (!is_gate(on.kind))
    out_ref = free_node(c.output);
  else if (bank.count(c.output))
    out_ref = bank.at(c.output);
  else
    out_ref = build_block(c.output);

  LayeredCircuit lc;
  lc.base = std::move(b.nc);
  lc.base.output = out_ref;
  lc.layers = std::move(b.layers);
  validate_layered(lc);

  ConversionReport rep;
  rep.in_size = c.size();
  rep.in_width = width(layer(c));
  rep.in_actuals = (long long)c.actual_vars.size();
  rep.in_guesses = (long long)c.guess_vars.size();
  rep.out_size = lc.base.size();
  rep.out_width = width(lc);
  rep.size_bound = -1;
  rep.width_bound = (long long)sources.size() + max_block_width;
  rep.ok = rep.out_width <= rep.width_bound;
  if (!rep.ok) throw Error("internal: rebuilt circuit exceeds its bounds");
  return {std::move(lc), rep};
}

Bit select_compose(const std::function<Bit(const std::vector<Bit>&)>& g,
                   int n, const std::vector<Bit>& x,
                   const std::vector<Bit>& z) {
  if (n < 0) throw Error("arity must be nonnegative");
  if ((int)x.size() != 2 * n || (int)z.size() != 2 * n)
    throw Error("selection expects 2n data and 2n selector bits");
  int weight = 0;
  for (Bit b : z) weight += b ? 1 : 0;
  if (weight != n) return 0;
  std::vector<Bit> sel;
  sel.reserve(n);
  for (int i = 0; i < 2 * n; ++i)
    if (z[i]) sel.push_back(x[i]);
  return g(sel);
}

Circuit family_circuit(StrategyFamily family, int param) {
  Circuit c;
  if (family == StrategyFamily::Path) {
    if (param < 1) throw Error("path length must be at least 1");
    c.actual_vars = {"x1"};
    Node in;
    in.id = "v1";
    in.kind = NodeKind::Input;
    in.var = "x1";
    c.nodes.push_back(in);
    for (int i = 2; i <= param; ++i) {
      Node n;
      n.id = "v" + std::to_string(i);
      n.kind = NodeKind::Not;
      n.lhs = i - 2;
      c.nodes.push_back(n);
    }
    c.output = param - 1;
  } else if (family == StrategyFamily::BinaryTree) {
    if (param < 0) throw Error("tree height must be at least 0");
    int leaves = 1 << param;
    int total = 2 * leaves - 1;
    for (int i = 1; i <= leaves; ++i)
      c.actual_vars.push_back("x" + std::to_string(i));
    std::map<int, int> pos;  // heap index -> storage index
    for (int k = total; k >= 1; --k) {
      Node n;
      n.id = "t" + std::to_string(k);
      if (k >= leaves) {
        n.kind = NodeKind::Input;
        n.var = "x" + std::to_string(k - leaves + 1);
      } else {
        n.kind = NodeKind::And;
        n.lhs = pos.at(2 * k);
        n.rhs = pos.at(2 * k + 1);
      }
      pos[k] = (int)c.nodes.size();
      c.nodes.push_back(n);
    }
    c.output = pos.at(1);
  } else {
    if (param < 0) throw Error("pyramid height must be at least 0");
    int h = param;
    for (int j = 0; j <= h; ++j)
      c.actual_vars.push_back("x" + std::to_string(j + 1));
    std::vector<std::vector<int>> at(h + 1);
    for (int j = 0; j <= h; ++j) {
      Node n;
      n.id = "p0_" + std::to_string(j);
      n.kind = NodeKind::Input;
      n.var = "x" + std::to_string(j + 1);
      at[0].push_back((int)c.nodes.size());
      c.nodes.push_back(n);
    }
    for (int i = 1; i <= h; ++i) {
      for (int j = 0; j + i <= h; ++j) {
        Node n;
        n.id = "p" + std::to_string(i) + "_" + std::to_string(j);
        n.kind = (i % 2 == 1) ? NodeKind::And : NodeKind::Or;
        n.lhs = at[i - 1][j];
        n.rhs = at[i - 1][j + 1];
        at[i].push_back((int)c.nodes.size());
        c.nodes.push_back(n);
      }
    }
    c.output = at[h][0];
  }
  validate_circuit(c);
  return c;
}

}  // namespace bwc
