#include "bwc/circuit.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace bwc {

void Assignment::bind(const std::string& v, Bit b) {
  auto [it, fresh] = bindings.emplace(v, b);
  if (!fresh) throw Error("variable '" + v + "' bound twice");
}

Assignment parse_assignment(const std::string& text) {
  Assignment a;
  if (text.empty()) return a;
  std::stringstream ss(text);
  std::string pair;
  while (std::getline(ss, pair, ',')) {
    auto eq = pair.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 2 != pair.size())
      throw Error("malformed assignment pair '" + pair + "' (want NAME=0|1)");
    char bit = pair[eq + 1];
    if (bit != '0' && bit != '1')
      throw Error("malformed assignment pair '" + pair + "' (want NAME=0|1)");
    a.bind(pair.substr(0, eq), bit == '1');
  }
  return a;
}

void validate_circuit(const Circuit& c) {
  std::unordered_set<std::string> actuals(c.actual_vars.begin(),
                                          c.actual_vars.end());
  std::unordered_set<std::string> guesses(c.guess_vars.begin(),
                                          c.guess_vars.end());
  if (actuals.size() != c.actual_vars.size())
    throw Error("duplicate actual variable declaration");
  if (guesses.size() != c.guess_vars.size())
    throw Error("duplicate guess variable declaration");
  for (const auto& v : c.actual_vars)
    if (guesses.count(v))
      throw Error("name '" + v + "' declared both actual and guess");

  std::unordered_set<std::string> ids;
  std::unordered_set<std::string> guess_labels;
  for (size_t i = 0; i < c.nodes.size(); ++i) {
    const Node& n = c.nodes[i];
    if (n.id.empty()) throw Error("node without id");
    if (!ids.insert(n.id).second) throw Error("duplicate id '" + n.id + "'");
    auto check_operand = [&](int op) {
      if (op < 0 || static_cast<size_t>(op) >= i)
        throw Error("node '" + n.id + "' references an undefined operand");
    };
    switch (n.kind) {
      case NodeKind::Input:
        if (!actuals.count(n.var))
          throw Error("node '" + n.id + "' reads undeclared variable '" +
                      n.var + "'");
        break;
      case NodeKind::Guess:
        if (!guesses.count(n.var))
          throw Error("node '" + n.id + "' reads undeclared guess '" + n.var +
                      "'");
        if (!guess_labels.insert(n.var).second)
          throw Error("guess '" + n.var + "' labels more than one node");
        break;
      case NodeKind::Const:
        break;
      case NodeKind::And:
      case NodeKind::Or:
        check_operand(n.lhs);
        check_operand(n.rhs);
        break;
      case NodeKind::Not:
      case NodeKind::Copy:
        check_operand(n.lhs);
        if (n.rhs != -1)
          throw Error("node '" + n.id + "' has a spurious second operand");
        break;
    }
  }
  if (c.output < 0 || static_cast<size_t>(c.output) >= c.nodes.size())
    throw Error("missing or invalid output");
}

void validate_layered(const LayeredCircuit& lc) {
  validate_circuit(lc.base);
  const auto& nodes = lc.base.nodes;
  std::vector<int> layer_of(nodes.size(), -1);
  for (size_t t = 0; t < lc.layers.size(); ++t) {
    for (int idx : lc.layers[t]) {
      if (idx < 0 || static_cast<size_t>(idx) >= nodes.size())
        throw Error("layer " + std::to_string(t + 1) +
                    " lists an unknown node");
      if (!is_gate(nodes[idx].kind))
        throw Error("layer " + std::to_string(t + 1) + " lists non-gate '" +
                    nodes[idx].id + "'");
      if (layer_of[idx] != -1)
        throw Error("gate '" + nodes[idx].id + "' appears in two layers");
      layer_of[idx] = static_cast<int>(t);
    }
  }
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (is_gate(nodes[i].kind) && layer_of[i] == -1)
      throw Error("gate '" + nodes[i].id + "' missing from the layer partition");
    if (!is_gate(nodes[i].kind)) continue;
    for (int op : {nodes[i].lhs, nodes[i].rhs}) {
      if (op == -1 || !is_gate(nodes[op].kind)) continue;
      if (layer_of[op] != layer_of[i] - 1)
        throw Error("edge '" + nodes[op].id + "' -> '" + nodes[i].id +
                    "' does not connect adjacent layers");
    }
  }
}

namespace {

struct Tok {
  std::string text;
  int col;  // 1-based
};

std::vector<Tok> tokenize(const std::string& line) {
  std::vector<Tok> out;
  size_t i = 0;
  while (i < line.size()) {
    if (line[i] == '#') break;
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) &&
           line[j] != '#')
      ++j;
    out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

}  // namespace

ParsedCircuit parse_circuit_file(const std::string& text) {
  Circuit c;
  std::vector<std::vector<int>> layers;
  bool saw_layer = false;
  std::unordered_map<std::string, int> index_of;
  std::unordered_set<std::string> actuals, guesses, guess_labels;
  bool have_output = false;

  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    std::vector<Tok> toks = tokenize(line);
    if (toks.empty()) continue;
    auto fail = [&](const std::string& msg, const Tok& at) -> void {
      throw ParseError(msg, lineno, at.col);
    };
    auto expect_count = [&](size_t n) {
      if (toks.size() != n)
        throw ParseError("malformed line (expected " + std::to_string(n) +
                             " tokens)",
                         lineno, toks[0].col);
    };
    auto resolve = [&](const Tok& t) -> int {
      auto it = index_of.find(t.text);
      if (it == index_of.end())
        fail("use of undefined node '" + t.text + "'", t);
      return it->second;
    };

    const std::string& head = toks[0].text;
    if (head == "var") {
      expect_count(2);
      if (!actuals.insert(toks[1].text).second ||
          guesses.count(toks[1].text))
        fail("variable '" + toks[1].text + "' declared twice", toks[1]);
      c.actual_vars.push_back(toks[1].text);
    } else if (head == "guess" && toks.size() == 2) {
      if (!guesses.insert(toks[1].text).second ||
          actuals.count(toks[1].text))
        fail("guess '" + toks[1].text + "' declared twice", toks[1]);
      c.guess_vars.push_back(toks[1].text);
    } else if (head == "output") {
      expect_count(2);
      if (have_output) fail("duplicate output line", toks[0]);
      c.output = resolve(toks[1]);
      have_output = true;
    } else if (head == "layer") {
      saw_layer = true;
      if (toks.size() < 2) fail("malformed layer line", toks[0]);
      std::string k = toks[1].text;
      if (!k.empty() && k.back() == ':') k.pop_back();
      int want = static_cast<int>(layers.size()) + 1;
      if (k != std::to_string(want))
        fail("layer lines must be numbered consecutively from 1 (expected " +
                 std::to_string(want) + ")",
             toks[1]);
      layers.emplace_back();
      for (size_t i = 2; i < toks.size(); ++i)
        layers.back().push_back(resolve(toks[i]));
    } else {
      // ID = kind ...
      if (toks.size() < 3 || toks[1].text != "=")
        fail("unrecognized line", toks[0]);
      if (index_of.count(head)) fail("duplicate id '" + head + "'", toks[0]);
      Node n;
      n.id = head;
      const std::string& kind = toks[2].text;
      if (kind == "input") {
        expect_count(4);
        if (!actuals.count(toks[3].text))
          fail("undeclared variable '" + toks[3].text + "'", toks[3]);
        n.kind = NodeKind::Input;
        n.var = toks[3].text;
      } else if (kind == "guess") {
        expect_count(4);
        if (!guesses.count(toks[3].text))
          fail("undeclared guess '" + toks[3].text + "'", toks[3]);
        if (!guess_labels.insert(toks[3].text).second)
          fail("guess '" + toks[3].text + "' already labels another node",
               toks[3]);
        n.kind = NodeKind::Guess;
        n.var = toks[3].text;
      } else if (kind == "const") {
        expect_count(4);
        if (toks[3].text != "0" && toks[3].text != "1")
          fail("const takes 0 or 1", toks[3]);
        n.kind = NodeKind::Const;
        n.value = toks[3].text == "1";
      } else if (kind == "and" || kind == "or") {
        expect_count(5);
        n.kind = kind == "and" ? NodeKind::And : NodeKind::Or;
        n.lhs = resolve(toks[3]);
        n.rhs = resolve(toks[4]);
      } else if (kind == "not" || kind == "copy") {
        expect_count(4);
        n.kind = kind == "not" ? NodeKind::Not : NodeKind::Copy;
        n.lhs = resolve(toks[3]);
      } else {
        fail("unknown node kind '" + kind + "'", toks[2]);
      }
      index_of[n.id] = static_cast<int>(c.nodes.size());
      c.nodes.push_back(std::move(n));
    }
  }
  if (!have_output) throw ParseError("missing output line", lineno, 1);
  validate_circuit(c);
  ParsedCircuit out;
  out.circuit = std::move(c);
  if (saw_layer) out.layers = std::move(layers);
  return out;
}

Circuit parse_circuit(const std::string& text) {
  ParsedCircuit p = parse_circuit_file(text);
  if (p.layers) {
    LayeredCircuit lc{p.circuit, *p.layers};
    validate_layered(lc);
  }
  return std::move(p.circuit);
}

LayeredCircuit parse_layered(const std::string& text) {
  ParsedCircuit p = parse_circuit_file(text);
  if (!p.layers) throw Error("file has no layer trailer");
  LayeredCircuit lc{std::move(p.circuit), std::move(*p.layers)};
  validate_layered(lc);
  return lc;
}

std::string serialize(const Circuit& c) {
  std::ostringstream out;
  for (const auto& v : c.actual_vars) out << "var " << v << "\n";
  for (const auto& v : c.guess_vars) out << "guess " << v << "\n";
  for (const Node& n : c.nodes) {
    out << n.id << " = ";
    switch (n.kind) {
      case NodeKind::Input:
        out << "input " << n.var;
        break;
      case NodeKind::Guess:
        out << "guess " << n.var;
        break;
      case NodeKind::Const:
        out << "const " << (n.value ? 1 : 0);
        break;
      case NodeKind::And:
        out << "and " << c.nodes[n.lhs].id << " " << c.nodes[n.rhs].id;
        break;
      case NodeKind::Or:
        out << "or " << c.nodes[n.lhs].id << " " << c.nodes[n.rhs].id;
        break;
      case NodeKind::Not:
        out << "not " << c.nodes[n.lhs].id;
        break;
      case NodeKind::Copy:
        out << "copy " << c.nodes[n.lhs].id;
        break;
    }
    out << "\n";
  }
  out << "output " << c.nodes[c.output].id << "\n";
  return out.str();
}

std::string serialize(const LayeredCircuit& lc) {
  std::ostringstream out;
  out << serialize(lc.base);
  for (size_t t = 0; t < lc.layers.size(); ++t) {
    out << "layer " << t + 1 << ":";
    for (int idx : lc.layers[t]) out << " " << lc.base.nodes[idx].id;
    out << "\n";
  }
  return out.str();
}

std::vector<Bit> evaluate_all_nodes(const Circuit& c, const Assignment& a) {
  std::vector<Bit> val(c.nodes.size(), 0);
  for (size_t i = 0; i < c.nodes.size(); ++i) {
    const Node& n = c.nodes[i];
    switch (n.kind) {
      case NodeKind::Input:
      case NodeKind::Guess: {
        auto it = a.bindings.find(n.var);
        if (it == a.bindings.end())
          throw Error("unbound variable '" + n.var + "'");
        val[i] = it->second;
        break;
      }
      case NodeKind::Const:
        val[i] = n.value;
        break;
      case NodeKind::And:
        val[i] = val[n.lhs] && val[n.rhs];
        break;
      case NodeKind::Or:
        val[i] = val[n.lhs] || val[n.rhs];
        break;
      case NodeKind::Not:
        val[i] = !val[n.lhs];
        break;
      case NodeKind::Copy:
        val[i] = val[n.lhs];
        break;
    }
  }
  return val;
}

namespace {

void check_bindings(const Circuit& c, const Assignment& a,
                    bool allow_guess_bindings) {
  std::set<std::string> legal(c.actual_vars.begin(), c.actual_vars.end());
  if (allow_guess_bindings)
    legal.insert(c.guess_vars.begin(), c.guess_vars.end());
  for (const auto& [name, bit] : a.bindings) {
    (void)bit;
    if (!legal.count(name))
      throw Error("binding for unknown variable '" + name + "'");
  }
  for (const auto& v : c.actual_vars)
    if (!a.has(v)) throw Error("unbound variable '" + v + "'");
}

}  // namespace

Bit evaluate(const Circuit& c, const Assignment& a) {
  for (const Node& n : c.nodes)
    if (n.kind == NodeKind::Guess)
      throw Error("circuit has guess inputs; use evaluate_nondet");
  check_bindings(c, a, false);
  return evaluate_all_nodes(c, a)[c.output];
}

Bit evaluate_complete(const Circuit& c, const Assignment& a) {
  check_bindings(c, a, true);
  for (const auto& v : c.guess_vars)
    if (!a.has(v)) throw Error("unbound guess '" + v + "'");
  return evaluate_all_nodes(c, a)[c.output];
}

std::optional<Assignment> evaluate_nondet_witness(const Circuit& c,
                                                  const Assignment& a,
                                                  int guess_limit) {
  check_bindings(c, a, false);
  std::vector<std::string> gs(c.guess_vars.begin(), c.guess_vars.end());
  std::sort(gs.begin(), gs.end());
  size_t m = gs.size();
  if (m > static_cast<size_t>(guess_limit))
    throw Error("too many guess variables (" + std::to_string(m) +
                " > limit " + std::to_string(guess_limit) + ")");
  for (uint64_t mask = 0; mask < (uint64_t{1} << m); ++mask) {
    Assignment total = a;
    Assignment guesses;
    for (size_t j = 0; j < m; ++j) {
      Bit b = (mask >> (m - 1 - j)) & 1;  // first name is most significant
      total.bind(gs[j], b);
      guesses.bind(gs[j], b);
    }
    if (evaluate_all_nodes(c, total)[c.output]) return guesses;
  }
  return std::nullopt;
}

Bit evaluate_nondet(const Circuit& c, const Assignment& a, int guess_limit) {
  return evaluate_nondet_witness(c, a, guess_limit).has_value();
}

Circuit restrict_circuit(const Circuit& c, const Assignment& partial) {
  std::set<std::string> actuals(c.actual_vars.begin(), c.actual_vars.end());
  for (const auto& [name, bit] : partial.bindings) {
    (void)bit;
    if (!actuals.count(name))
      throw Error("'" + name + "' is not an actual variable of the circuit");
  }

  // Symbolic result per old node: a constant or an index into the new list.
  struct Res {
    bool is_const;
    Bit bit;
    int idx;
  };
  std::vector<Res> res(c.nodes.size());
  std::vector<Node> fresh;  // still unpruned
  auto emit = [&](Node n) {
    fresh.push_back(std::move(n));
    return Res{false, 0, static_cast<int>(fresh.size()) - 1};
  };

  for (size_t i = 0; i < c.nodes.size(); ++i) {
    Node n = c.nodes[i];
    switch (n.kind) {
      case NodeKind::Input:
        res[i] = partial.has(n.var) ? Res{true, partial.at(n.var), -1}
                                    : emit(n);
        break;
      case NodeKind::Guess:
        res[i] = emit(n);
        break;
      case NodeKind::Const:
        res[i] = Res{true, n.value, -1};
        break;
      case NodeKind::And:
      case NodeKind::Or: {
        Res a = res[n.lhs], b = res[n.rhs];
        Bit identity = n.kind == NodeKind::And;  // 1 for AND, 0 for OR
        if (a.is_const && b.is_const)
          res[i] = Res{true,
                       n.kind == NodeKind::And ? (a.bit && b.bit)
                                               : (a.bit || b.bit),
                       -1};
        else if (a.is_const)
          res[i] = (a.bit == identity) ? b : Res{true, a.bit, -1};
        else if (b.is_const)
          res[i] = (b.bit == identity) ? a : Res{true, b.bit, -1};
        else {
          n.lhs = a.idx;
          n.rhs = b.idx;
          res[i] = emit(n);
        }
        break;
      }
      case NodeKind::Not: {
        Res a = res[n.lhs];
        if (a.is_const)
          res[i] = Res{true, !a.bit, -1};
        else {
          n.lhs = a.idx;
          res[i] = emit(n);
        }
        break;
      }
      case NodeKind::Copy: {
        Res a = res[n.lhs];
        if (a.is_const)
          res[i] = Res{true, a.bit, -1};
        else {
          n.lhs = a.idx;
          res[i] = emit(n);
        }
        break;
      }
    }
  }

  Circuit out;
  for (const auto& v : c.actual_vars)
    if (!partial.has(v)) out.actual_vars.push_back(v);

  Res o = res[c.output];
  if (o.is_const) {
    std::unordered_set<std::string> used;
    for (const Node& n : c.nodes) used.insert(n.id);
    std::string id = "k0";
    for (int k = 1; used.count(id); ++k) id = "k" + std::to_string(k);
    Node n;
    n.id = id;
    n.kind = NodeKind::Const;
    n.value = o.bit;
    out.nodes.push_back(std::move(n));
    out.output = 0;
    return out;
  }

  // Prune everything not feeding the output.
  std::vector<char> keep(fresh.size(), 0);
  std::vector<int> stack{o.idx};
  keep[o.idx] = 1;
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    for (int op : {fresh[i].lhs, fresh[i].rhs})
      if (op != -1 && !keep[op]) {
        keep[op] = 1;
        stack.push_back(op);
      }
  }
  std::vector<int> remap(fresh.size(), -1);
  for (size_t i = 0; i < fresh.size(); ++i) {
    if (!keep[i]) continue;
    Node n = fresh[i];
    if (n.lhs != -1) n.lhs = remap[n.lhs];
    if (n.rhs != -1) n.rhs = remap[n.rhs];
    remap[i] = static_cast<int>(out.nodes.size());
    out.nodes.push_back(std::move(n));
  }
  out.output = remap[o.idx];
  for (const Node& n : out.nodes)
    if (n.kind == NodeKind::Guess) out.guess_vars.push_back(n.var);
  {
    // keep declaration order of the original
    std::set<std::string> surviving(out.guess_vars.begin(),
                                    out.guess_vars.end());
    out.guess_vars.clear();
    for (const auto& v : c.guess_vars)
      if (surviving.count(v)) out.guess_vars.push_back(v);
  }
  validate_circuit(out);
  return out;
}

namespace {

std::vector<int> gate_depths(const Circuit& c) {
  std::vector<int> d(c.nodes.size(), 0);
  for (size_t i = 0; i < c.nodes.size(); ++i) {
    const Node& n = c.nodes[i];
    if (!is_gate(n.kind)) continue;
    int m = 0;
    for (int op : {n.lhs, n.rhs})
      if (op != -1) m = std::max(m, d[op]);
    d[i] = m + 1;
  }
  return d;
}

}  // namespace

LayeredCircuit layer(const Circuit& c) {
  validate_circuit(c);
  std::vector<int> d = gate_depths(c);
  int D = 0;
  for (size_t i = 0; i < c.nodes.size(); ++i)
    if (is_gate(c.nodes[i].kind)) D = std::max(D, d[i]);
  LayeredCircuit lc;
  if (D == 0) {
    lc.base = c;
    return lc;
  }

  // Deepest layer consuming each gate's value; a single COPY chain per
  // source serves all consumers.
  std::vector<int> deepest_use(c.nodes.size(), 0);
  for (size_t i = 0; i < c.nodes.size(); ++i) {
    const Node& n = c.nodes[i];
    if (!is_gate(n.kind)) continue;
    for (int op : {n.lhs, n.rhs})
      if (op != -1 && is_gate(c.nodes[op].kind))
        deepest_use[op] = std::max(deepest_use[op], d[i]);
  }

  std::unordered_set<std::string> used;
  for (const Node& n : c.nodes) used.insert(n.id);
  int next_copy = 1;
  auto fresh_id = [&] {
    std::string id;
    do {
      id = "c" + std::to_string(next_copy++);
    } while (used.count(id));
    used.insert(id);
    return id;
  };

  Circuit& nc = lc.base;
  nc.actual_vars = c.actual_vars;
  nc.guess_vars = c.guess_vars;
  std::vector<int> remap(c.nodes.size(), -1);
  for (size_t i = 0; i < c.nodes.size(); ++i)
    if (!is_gate(c.nodes[i].kind)) {
      remap[i] = static_cast<int>(nc.nodes.size());
      nc.nodes.push_back(c.nodes[i]);
    }

  // chain[u] = new index of u's relay at the layer most recently built
  std::unordered_map<int, int> chain;
  lc.layers.assign(D, {});
  for (int t = 1; t <= D; ++t) {
    for (size_t i = 0; i < c.nodes.size(); ++i) {
      if (!is_gate(c.nodes[i].kind) || d[i] != t) continue;
      Node n = c.nodes[i];
      for (int* op : {&n.lhs, &n.rhs}) {
        if (*op == -1) continue;
        if (is_gate(c.nodes[*op].kind) && d[*op] < t - 1)
          *op = chain.at(*op);
        else
          *op = remap[*op];
      }
      remap[i] = static_cast<int>(nc.nodes.size());
      lc.layers[t - 1].push_back(remap[i]);
      nc.nodes.push_back(std::move(n));
    }
    // a relay for u sits in every layer strictly between u and its
    // deepest consumer
    for (size_t u = 0; u < c.nodes.size(); ++u) {
      if (!is_gate(c.nodes[u].kind)) continue;
      if (d[u] >= t || deepest_use[u] <= t) continue;
      Node cp;
      cp.id = fresh_id();
      cp.kind = NodeKind::Copy;
      cp.lhs = (t == d[u] + 1) ? remap[u] : chain.at(u);
      chain[u] = static_cast<int>(nc.nodes.size());
      lc.layers[t - 1].push_back(chain[u]);
      nc.nodes.push_back(std::move(cp));
    }
  }
  nc.output = remap[c.output];
  validate_layered(lc);
  return lc;
}

int width(const LayeredCircuit& lc) {
  size_t w = 0;
  for (const auto& l : lc.layers) w = std::max(w, l.size());
  return static_cast<int>(w);
}

std::map<std::string, int> read_multiplicities(const Circuit& c) {
  std::map<std::string, int> m;
  for (const auto& v : c.actual_vars) m[v] = 0;
  for (const Node& n : c.nodes)
    if (n.kind == NodeKind::Input) ++m[n.var];
  return m;
}

int depth(const Circuit& c) {
  std::vector<int> d = gate_depths(c);
  return d[c.output];
}

}  // namespace bwc
