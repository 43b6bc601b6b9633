#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bwc/circuit.hpp"

// The black-white pebble game on DAGs. A configuration is a pair of
// disjoint vertex sets (B, W). Moves:
//
//   1. place a black pebble on an empty vertex whose predecessors are
//      all pebbled (either color; vacuous for sources)
//   2. remove a black pebble
//   3. place a white pebble on an empty vertex
//   4. remove a white pebble from a vertex whose predecessors are all
//      pebbled (vacuous for sources)
//
// A pebbling starts from the empty configuration and ends with exactly
// one black pebble, on the sink. time = number of moves, space = the
// largest number of pebbles on the graph at once. Black mode forbids
// white moves.
//
// Graph format:  vertex ID / edge FROM TO / sink ID
// Trace format:  one move per line, "B+ v", "B- v", "W+ v", "W- v"

namespace bwc {

struct PebbleGraph {
  std::vector<std::string> vertices;
  std::vector<std::pair<int, int>> edges;  // (pred, succ) index pairs
  int sink = -1;

  bool operator==(const PebbleGraph&) const = default;
};

enum class MoveKind { PlaceBlack, RemoveBlack, PlaceWhite, RemoveWhite };

struct Move {
  MoveKind kind;
  int vertex;
  bool operator==(const Move&) const = default;
};

struct Pebbling {
  std::vector<Move> moves;
  bool operator==(const Pebbling&) const = default;
};

enum class PebbleMode { Black, BlackWhite };

// DAG, unique sink (the only vertex of out-degree 0), no self-loops or
// duplicate edges.
void validate_graph(const PebbleGraph& g);

PebbleGraph parse_pebble_graph(const std::string& text);
std::string serialize(const PebbleGraph& g);

// Trace parsing needs the graph for vertex-name resolution.
Pebbling parse_pebbling(const std::string& text, const PebbleGraph& g);
std::string serialize(const Pebbling& p, const PebbleGraph& g);

struct Violation {
  int move_index;  // 0-based; == moves.size() for a bad final configuration
  int rule;        // 1..4, or 0 for the final-configuration check
  std::string message;
};

// nullopt when p is a valid pebbling of g in the given mode. Unknown
// vertices throw; rule breaches are reported, not thrown.
std::optional<Violation> validate_pebbling(const PebbleGraph& g,
                                           const Pebbling& p, PebbleMode mode);

struct Measures {
  int time = 0;
  int space = 0;
};

// Time and space of a move sequence. Throws if the sequence is not even
// simulatable (removal without a pebble, placement on an occupied
// vertex); rule checks beyond that are validate_pebbling's job.
Measures measures(const Pebbling& p);

struct SearchResult {
  int space = 0;
  Pebbling witness;
};

// Minimum-space pebbling by iterative deepening on the space bound with
// a BFS over configurations at each bound. The witness is the shortest
// valid pebbling at the optimal bound; ties are broken toward the
// lexicographically least move sequence (B+ < B- < W+ < W-, then vertex
// order). space_cap 0 means |vertices|. nullopt when no pebbling exists
// within space_cap.
std::optional<SearchResult> search_min_space(const PebbleGraph& g,
                                             PebbleMode mode,
                                             int space_cap = 0,
                                             int vertex_cap = 0);

enum class StrategyFamily { Path, BinaryTree, Pyramid };

struct GeneratedStrategy {
  PebbleGraph graph;
  Pebbling pebbling;
};

// Built-in black strategies:
//   path(len):        2-pebble slide along v1 -> ... -> vlen
//   binary_tree(h):   recursive, space <= h+2, sink t1, children of ti
//                     are t(2i) and t(2i+1)
//   pyramid(h):       row sweep, space <= h+2, vertices p<i>_<j> with
//                     predecessors p<i-1>_<j> and p<i-1>_<j+1>
GeneratedStrategy generate_strategy(StrategyFamily family, int param);

}  // namespace bwc
