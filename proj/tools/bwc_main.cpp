// Command line front end. Artifacts (circuits, programs, traces) go to
// -o FILE with the textual report on stdout; without -o the artifact
// takes stdout and the report moves to stderr. `sat` always prints the
// verdict and witness on stdout and its statistics on stderr, so the
// verdict bytes do not depend on the method.
//
// Exit codes: 0 success, 1 parse/validation/domain failure, 2 usage,
// 10 unsatisfiable.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "bwc/bp.hpp"
#include "bwc/circuit.hpp"
#include "bwc/conversions.hpp"
#include "bwc/pebbling.hpp"
#include "bwc/sat.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw bwc::Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw bwc::Error("cannot write " + path);
  out << text;
}

void emit(const std::string& artifact, const std::string& report,
          const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << artifact;
    std::cerr << report;
  } else {
    write_file(out_path, artifact);
    std::cout << report;
  }
}

bwc::LayeredCircuit load_layered(const std::string& path) {
  bwc::ParsedCircuit parsed = bwc::parse_circuit_file(read_file(path));
  if (parsed.layers) {
    bwc::LayeredCircuit lc{parsed.circuit, *parsed.layers};
    bwc::validate_layered(lc);
    return lc;
  }
  return bwc::layer(parsed.circuit);
}

bwc::PebbleMode parse_mode(const std::string& s) {
  if (s == "black") return bwc::PebbleMode::Black;
  if (s == "bw") return bwc::PebbleMode::BlackWhite;
  throw bwc::Error("unknown mode: " + s);
}

bwc::StrategyFamily parse_family(const std::string& s) {
  if (s == "path") return bwc::StrategyFamily::Path;
  if (s == "tree") return bwc::StrategyFamily::BinaryTree;
  if (s == "pyramid") return bwc::StrategyFamily::Pyramid;
  throw bwc::Error("unknown family: " + s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bounded width circuit toolkit"};
  app.require_subcommand(1);
  int rc = 0;

  // stats FILE
  std::string stats_file;
  auto* cmd_stats = app.add_subcommand("stats", "circuit measures");
  cmd_stats->add_option("file", stats_file)->required();
  cmd_stats->callback([&]() {
    bwc::ParsedCircuit parsed =
        bwc::parse_circuit_file(read_file(stats_file));
    const bwc::Circuit& c = parsed.circuit;
    bwc::LayeredCircuit lc;
    if (parsed.layers) {
      lc = bwc::LayeredCircuit{c, *parsed.layers};
      bwc::validate_layered(lc);
    } else {
      lc = bwc::layer(c);
    }
    std::cout << "n=" << c.actual_vars.size() << " m=" << c.guess_vars.size()
              << " s=" << c.size() << " depth=" << bwc::depth(c)
              << " width=" << bwc::width(lc) << "\n";
    for (const auto& [v, k] : bwc::read_multiplicities(c))
      std::cout << "mult " << v << "=" << k << "\n";
  });

  // eval FILE --assign ASSIGNMENT
  std::string eval_file, eval_assign;
  auto* cmd_eval = app.add_subcommand("eval", "evaluate a circuit");
  cmd_eval->add_option("file", eval_file)->required();
  cmd_eval->add_option("--assign", eval_assign, "NAME=0|1,NAME=0|1,...")
      ->required();
  cmd_eval->callback([&]() {
    bwc::Circuit c = bwc::parse_circuit_file(read_file(eval_file)).circuit;
    bwc::Assignment a = bwc::parse_assignment(eval_assign);
    // circuits with guess inputs are accepted if some guess works
    bwc::Bit v = c.guess_vars.empty() ? bwc::evaluate(c, a)
                                      : bwc::evaluate_nondet(c, a);
    std::cout << (v ? 1 : 0) << "\n";
  });

  // layer FILE [-o OUT]
  std::string layer_file, layer_out;
  auto* cmd_layer = app.add_subcommand("layer", "insert relay COPY layers");
  cmd_layer->add_option("file", layer_file)->required();
  cmd_layer->add_option("-o", layer_out);
  cmd_layer->callback([&]() {
    bwc::Circuit c = bwc::parse_circuit_file(read_file(layer_file)).circuit;
    bwc::LayeredCircuit lc = bwc::layer(c);
    emit(bwc::serialize(lc),
         "width=" + std::to_string(bwc::width(lc)) + "\n", layer_out);
  });

  // to-bp FILE [-o OUT]
  std::string tobp_file, tobp_out;
  auto* cmd_tobp =
      app.add_subcommand("to-bp", "layered circuit to branching program");
  cmd_tobp->add_option("file", tobp_file)->required();
  cmd_tobp->add_option("-o", tobp_out);
  cmd_tobp->callback([&]() {
    bwc::BpConversion conv = bwc::circuit_to_bp(load_layered(tobp_file));
    emit(bwc::serialize(conv.bp), conv.report.to_text(), tobp_out);
  });

  std::string pv_graph, pv_trace, pv_mode = "black";
  auto* cmd_pv = app.add_subcommand("pebble-validate", "check a trace");
  cmd_pv->add_option("graph", pv_graph)->required();
  cmd_pv->add_option("trace", pv_trace)->required();
  cmd_pv->add_option("--mode", pv_mode, "black or bw");
  cmd_pv->callback([&]() {
    bwc::PebbleGraph g = bwc::parse_pebble_graph(read_file(pv_graph));
    bwc::Pebbling p = bwc::parse_pebbling(read_file(pv_trace), g);
    if (auto v = bwc::validate_pebbling(g, p, parse_mode(pv_mode))) {
      std::cerr << "violation move=" << v->move_index
                << " rule=" << v->rule << ": " << v->message << "\n";
      rc = 1;
      return;
    }
    bwc::Measures m = bwc::measures(p);
    std::cout << "ok time=" << m.time << " space=" << m.space << "\n";
  });

  std::string ps_graph, ps_out, ps_mode = "black";
  int ps_space_cap = 0;
  auto* cmd_ps =
      app.add_subcommand("pebble-search", "minimum-space pebbling");
  cmd_ps->add_option("graph", ps_graph)->required();
  cmd_ps->add_option("--mode", ps_mode, "black or bw");
  cmd_ps->add_option("--max-space", ps_space_cap,
                     "0 means no limit beyond the vertex count");
  cmd_ps->add_option("-o", ps_out);
  cmd_ps->callback([&]() {
    bwc::PebbleGraph g = bwc::parse_pebble_graph(read_file(ps_graph));
    auto res = bwc::search_min_space(g, parse_mode(ps_mode), ps_space_cap);
    if (!res) throw bwc::Error("no pebbling within the space cap");
    emit(bwc::serialize(res->witness, g),
         "space=" + std::to_string(res->space) +
             " time=" + std::to_string(res->witness.moves.size()) + "\n",
         ps_out);
  });

  std::string pg_family, pg_prefix;
  int pg_param = 0;
  auto* cmd_pg =
      app.add_subcommand("pebble-gen", "graph and strategy families");
  cmd_pg->add_option("family", pg_family, "path, tree or pyramid")
      ->required();
  cmd_pg->add_option("param", pg_param)->required();
  cmd_pg->add_option("-o", pg_prefix, "writes PREFIX.graph and PREFIX.trace")
      ->required();
  cmd_pg->callback([&]() {
    bwc::GeneratedStrategy gs =
        bwc::generate_strategy(parse_family(pg_family), pg_param);
    write_file(pg_prefix + ".graph", bwc::serialize(gs.graph));
    write_file(pg_prefix + ".trace",
               bwc::serialize(gs.pebbling, gs.graph));
    bwc::Measures m = bwc::measures(gs.pebbling);
    std::cout << "vertices=" << gs.graph.vertices.size()
              << " moves=" << gs.pebbling.moves.size()
              << " space=" << m.space << "\n";
  });

  std::string pc_circuit, pc_trace, pc_out, pc_mode = "black";
  auto* cmd_pc =
      app.add_subcommand("pebble-compile", "pebbling to layered circuit");
  cmd_pc->add_option("circuit", pc_circuit)->required();
  cmd_pc->add_option("trace", pc_trace)->required();
  cmd_pc->add_option("--mode", pc_mode, "black or bw");
  cmd_pc->add_option("-o", pc_out);
  cmd_pc->callback([&]() {
    bwc::Circuit c = bwc::parse_circuit_file(read_file(pc_circuit)).circuit;
    bwc::PebbleGraph g = bwc::pebble_graph_of(c);
    bwc::Pebbling p = bwc::parse_pebbling(read_file(pc_trace), g);
    if (parse_mode(pc_mode) == bwc::PebbleMode::Black) {
      bwc::CircuitConversion conv = bwc::black_pebbling_to_circuit(c, p);
      emit(bwc::serialize(conv.circuit), conv.report.to_text(), pc_out);
    } else {
      bwc::BwConversion conv = bwc::bw_pebbling_to_circuit(c, p);
      std::string report = conv.report.to_text();
      for (const auto& [var, vertex] : conv.guesses)
        report += "guess " + var + "=" + vertex + "\n";
      emit(bwc::serialize(conv.circuit), report, pc_out);
    }
  });

  // depth-reduce FILE --target D [-o OUT]
  std::string dr_file, dr_out;
  int dr_target = 0;
  auto* cmd_dr = app.add_subcommand(
      "depth-reduce", "cut edges and rebuild at bounded width");
  cmd_dr->add_option("file", dr_file)->required();
  cmd_dr->add_option("--target", dr_target, "depth after cutting")
      ->required();
  cmd_dr->add_option("-o", dr_out);
  cmd_dr->callback([&]() {
    bwc::Circuit c = bwc::parse_circuit_file(read_file(dr_file)).circuit;
    auto cut = bwc::valiant_cut(c, dr_target);
    bwc::CircuitConversion conv = bwc::cut_to_bounded_width(c, cut);
    emit(bwc::serialize(conv.circuit),
         "cut=" + std::to_string(cut.size()) + "\n" + conv.report.to_text(),
         dr_out);
  });

  // sat FILE [--method width|brute] [--backend enum] [--jobs N]
  std::string sat_file, sat_method = "width", sat_backend = "enum";
  int sat_jobs = 1;
  auto* cmd_sat = app.add_subcommand("sat", "satisfiability");
  cmd_sat->add_option("file", sat_file)->required();
  cmd_sat->add_option("--method", sat_method, "width or brute");
  cmd_sat->add_option("--backend", sat_backend,
                      "program solver for the width method");
  cmd_sat->add_option("--jobs", sat_jobs, "outer enumeration workers");
  cmd_sat->callback([&]() {
    if (sat_backend != "enum")
      throw bwc::Error("unknown backend: " + sat_backend);
    bwc::Circuit c = bwc::parse_circuit_file(read_file(sat_file)).circuit;
    bwc::SatResult res;
    if (sat_method == "brute") {
      res = bwc::brute_force_sat(c);
      std::cerr << "method=brute assignments=" << res.stats.assignments
                << "\n";
    } else if (sat_method == "width") {
      res = bwc::bounded_width_sat(c, {}, {}, sat_jobs);
      std::cerr << "method=width assignments=" << res.stats.assignments
                << " conversions=" << res.stats.conversions
                << " k=" << res.stats.k << " chosen=";
      for (size_t i = 0; i < res.stats.chosen.size(); ++i)
        std::cerr << (i ? "," : "") << res.stats.chosen[i];
      std::cerr << "\n";
    } else {
      throw bwc::Error("unknown method: " + sat_method);
    }
    if (!res.satisfiable) {
      std::cout << "unsatisfiable\n";
      rc = 10;
      return;
    }
    std::cout << "satisfiable\n";
    for (const auto& [var, val] : res.witness->bindings)
      std::cout << var << "=" << (val ? 1 : 0) << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
