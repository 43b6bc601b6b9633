#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Boolean circuits over fan-in-2 AND/OR, NOT, COPY, with two kinds of
// inputs: actual variables and existentially quantified guess variables.
// Nodes are stored in definition order, which is always topological.
//
// Text format (one item per line, '#' starts a comment):
//
//   var NAME          declare an actual variable
//   guess NAME        declare a guess variable
//   ID = input NAME   input node reading an actual variable
//   ID = guess NAME   input node reading a guess variable (at most one
//                     node per guess name)
//   ID = const 0|1
//   ID = and A B
//   ID = or A B
//   ID = not A
//   ID = copy A
//   output ID
//   layer K: ID ...   optional trailer giving a layer partition of the
//                     gates, K = 1,2,... in order
//
// Every operand must be defined on an earlier line.

namespace bwc {

using Bit = bool;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int col)
      : Error("line " + std::to_string(line) + ", col " + std::to_string(col) +
              ": " + what),
        line(line),
        col(col) {}
  int line;
  int col;
};

enum class NodeKind { Input, Guess, Const, And, Or, Not, Copy };

inline bool is_gate(NodeKind k) {
  return k == NodeKind::And || k == NodeKind::Or || k == NodeKind::Not ||
         k == NodeKind::Copy;
}

// COPY gates exist only to relay a value into the next layer; they are
// excluded from the size measure.
inline bool counts_for_size(NodeKind k) {
  return k == NodeKind::And || k == NodeKind::Or || k == NodeKind::Not;
}

struct Node {
  std::string id;
  NodeKind kind = NodeKind::Const;
  std::string var;   // Input/Guess only
  Bit value = 0;     // Const only
  int lhs = -1;      // operand indices into Circuit::nodes
  int rhs = -1;      // second operand for And/Or

  bool operator==(const Node&) const = default;
};

struct Circuit {
  std::vector<Node> nodes;  // topological storage order
  int output = -1;          // index into nodes
  std::vector<std::string> actual_vars;  // declaration order
  std::vector<std::string> guess_vars;

  int size() const {
    int s = 0;
    for (const Node& n : nodes) s += counts_for_size(n.kind) ? 1 : 0;
    return s;
  }
  int copy_count() const {
    int s = 0;
    for (const Node& n : nodes) s += n.kind == NodeKind::Copy ? 1 : 0;
    return s;
  }

  bool operator==(const Circuit&) const = default;
};

// A circuit whose gates are partitioned into layers 1..L such that every
// gate-to-gate edge connects adjacent layers. Edges out of input and
// constant nodes may enter any layer; those nodes belong to no layer and
// do not count toward the width.
struct LayeredCircuit {
  Circuit base;
  std::vector<std::vector<int>> layers;  // node indices per layer

  bool operator==(const LayeredCircuit&) const = default;
};

// Partial or total truth assignment, variable name -> bit.
struct Assignment {
  std::map<std::string, Bit> bindings;

  bool has(const std::string& v) const { return bindings.count(v) != 0; }
  Bit at(const std::string& v) const { return bindings.at(v); }
  void bind(const std::string& v, Bit b);

  bool operator==(const Assignment&) const = default;
};

// "x1=1,x2=0" -> Assignment; rejects malformed pairs and duplicates.
Assignment parse_assignment(const std::string& text);

// Throws Error if any structural invariant is broken: operand arity and
// ordering, undeclared variable references, duplicate guess labels,
// missing output. Layer partitions, when present, are checked by
// validate_layered instead.
void validate_circuit(const Circuit& c);
void validate_layered(const LayeredCircuit& lc);

Circuit parse_circuit(const std::string& text);
// Requires the layer trailer to be present and valid.
LayeredCircuit parse_layered(const std::string& text);
// Detects the trailer automatically; layers is empty when absent.
struct ParsedCircuit {
  Circuit circuit;
  std::optional<std::vector<std::vector<int>>> layers;
};
ParsedCircuit parse_circuit_file(const std::string& text);

std::string serialize(const Circuit& c);
std::string serialize(const LayeredCircuit& lc);

// Deterministic evaluation. `a` must bind exactly the actual variables;
// the circuit must have no guess nodes.
Bit evaluate(const Circuit& c, const Assignment& a);

// Evaluation with guess variables bound as well (total assignment).
Bit evaluate_complete(const Circuit& c, const Assignment& a);

// Existential semantics: 1 iff some setting of the guess variables makes
// the output 1 under `a`. Enumerates at most 2^guess_limit settings.
Bit evaluate_nondet(const Circuit& c, const Assignment& a,
                    int guess_limit = 20);
// Same, returning the first accepting guess setting in lexicographic
// order over name-sorted guess vectors, or nullopt.
std::optional<Assignment> evaluate_nondet_witness(const Circuit& c,
                                                  const Assignment& a,
                                                  int guess_limit = 20);

// Substitutes constants for the bound variables' input nodes and folds
// gates with constant operands. No other rewriting: surviving gates keep
// their identity, and nodes no longer feeding the output are dropped.
// Bound names must be actual variables of c.
Circuit restrict_circuit(const Circuit& c, const Assignment& partial);

// Assigns every gate its gate-depth (operands that are inputs or
// constants contribute depth 0) and inserts COPY chains for gate-to-gate
// edges spanning more than one layer. One chain per source gate, shared
// by all its consumers. Function and non-COPY gate count are preserved.
LayeredCircuit layer(const Circuit& c);

// Max gates per layer, COPY gates included. 0 for a gateless circuit.
int width(const LayeredCircuit& lc);

// Number of input nodes per actual variable; declared-but-unread
// variables map to 0. Guess variables are not included.
std::map<std::string, int> read_multiplicities(const Circuit& c);

// Gate count along the longest input-to-output path (COPY included).
// 0 when the output is an input or constant node.
int depth(const Circuit& c);

// Internal helper shared by evaluators and tests: value of every node
// under a total assignment.
std::vector<Bit> evaluate_all_nodes(const Circuit& c, const Assignment& a);

}  // namespace bwc
