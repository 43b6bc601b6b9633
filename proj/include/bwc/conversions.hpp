#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "bwc/bp.hpp"
#include "bwc/circuit.hpp"
#include "bwc/pebbling.hpp"

// Structure-preserving translations between the three machine models:
// layered circuits to branching programs, pebblings to (layered)
// circuits, and depth reduction by edge cutting. Every conversion
// returns a report with the bound it promises; a conversion that cannot
// meet its own bound throws rather than returning a bad artifact.

namespace bwc {

struct ConversionReport {
  long long in_size = 0;     // non-COPY gates of the source
  long long in_width = 0;
  long long in_actuals = 0;
  long long in_guesses = 0;
  long long out_size = 0;
  long long out_width = 0;
  long long size_bound = -1;   // -1 when the conversion asserts none
  long long width_bound = -1;
  bool ok = false;

  std::string bound_text() const;
  // the key=value block emitted by the CLI
  std::string to_text() const;
};

struct BpConversion {
  BranchingProgram bp;
  ConversionReport report;
};

// Walks the layers left to right keeping only the values still needed:
// between layers those are the previous layer's gate values with a
// consumer ahead (at most w bits). Each input or guess node is read at
// most once per layer transition; a read adds one level of program
// nodes, one node per reachable carried-bit combination. Gates never
// add nodes; their effect is folded into where the edges point. Output
// size is at most 4^w * (reads + 1) + 2. Gates on no path to the output
// are skipped. Fails for width > width_cap.
BpConversion circuit_to_bp(const LayeredCircuit& lc, int width_cap = 12);

struct CircuitConversion {
  LayeredCircuit circuit;
  ConversionReport report;
};

// The dependency DAG of a circuit: one vertex per node, edges operand ->
// consumer, sink = output. Fails when some node other than the output
// feeds nothing (the game needs a unique sink).
PebbleGraph pebble_graph_of(const Circuit& c);

// Replays a valid black pebbling of pebble_graph_of(c) as a layered
// circuit, one layer per move. Placing a pebble materializes that
// vertex's gate (or input); every still-pebbled gate value is relayed by
// a COPY per layer. Non-COPY size <= number of placements <= time(p),
// width <= space(p).
CircuitConversion black_pebbling_to_circuit(const Circuit& c,
                                            const Pebbling& p);

struct BwConversion {
  LayeredCircuit circuit;
  ConversionReport report;
  // (guess variable, vertex id) per white placement, in move order
  std::vector<std::pair<std::string, std::string>> guesses;
};

// Black-white variant. A white placement introduces a fresh guess input
// standing for the vertex's value; removing it appends a check that the
// guess equals the value recomputed from the (pebbled) predecessors,
// folded clause by clause into a running validity wire:
//
//   validity &= (val OR NOT g)   as NOT(AND(NOT val, g))
//   validity &= (NOT val OR g)
//
// one gate per layer with the value recomputed per clause, so the
// scratch never exceeds one wire beyond the validity wire and the
// carried pebble values. The output is AND(sink value, validity); a
// wrong guess forces it to 0. Width <= space(p) + 1, non-COPY gates
// <= 6 * time(p).
BwConversion bw_pebbling_to_circuit(const Circuit& c, const Pebbling& p);

// Iterated edge cutting: label every node with its gate-depth, classify
// each gate-to-gate edge by the most significant bit at which the
// endpoint labels differ, remove the smallest non-empty class, relabel;
// repeat until the cut-free depth (over all gates) is <= target_depth.
// Returns the removed edges as (source id, target id) pairs.
std::vector<std::pair<std::string, std::string>> valiant_cut(
    const Circuit& c, int target_depth);

// Rebuilds c as a chain of blocks: for each cut-edge source in
// topological order, the cut-free cone of that source is spliced in as
// its own stack of layers and the computed value joins a register bank
// relayed by COPY chains through everything that follows; the output
// cone comes last. Width <= bank size + widest block.
CircuitConversion cut_to_bounded_width(
    const Circuit& c,
    const std::vector<std::pair<std::string, std::string>>& cut);

// f(x, z) for |x| = |z| = 2n: 0 unless exactly n entries of z are 1,
// else g applied to the x-bits at the positions where z is 1, in index
// order.
Bit select_compose(const std::function<Bit(const std::vector<Bit>&)>& g,
                   int n, const std::vector<Bit>& x,
                   const std::vector<Bit>& z);

// Circuits whose dependency DAGs realize the strategy families, with
// vertex names matching generate_strategy: path = NOT chain, tree = AND
// tree over fresh inputs, pyramid = alternating AND/OR rows.
Circuit family_circuit(StrategyFamily family, int param);

}  // namespace bwc
