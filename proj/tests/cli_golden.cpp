// Golden tests for the command-line tool: byte-exact outputs for the
// worked examples plus the exit-code contract. Takes the binary path as
// its only argument.

#include <cstdio>
#include <string>

#include "support/run.hpp"

namespace {

int failures = 0;
std::string bwc;

void expect(bool ok, const std::string& what) {
  if (!ok) {
    ++failures;
    std::printf("FAIL %s\n", what.c_str());
  }
}

void expect_eq(const std::string& got, const std::string& want,
               const std::string& what) {
  if (got != want) {
    ++failures;
    std::printf("FAIL %s\n  want: %s\n  got:  %s\n", what.c_str(),
                want.c_str(), got.c_str());
  }
}

std::string path(const std::string& name) { return run::workdir() + "/" + name; }

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::printf("usage: cli_golden BWC_BINARY\n");
    return 2;
  }
  bwc = argv[1];

  run::spit(path("not.cir"),
            "var x1\nn1 = input x1\nn2 = not n1\noutput n2\n");
  run::spit(path("path.graph"),
            "vertex a\nvertex b\nvertex z\nedge a b\nedge b z\nsink z\n");
  run::spit(path("path.trace"), "B+ a\nB+ b\nB- a\nB+ z\nB- b\n");
  run::spit(path("conj.cir"),
            "var x1\nvar x2\nguess y1\n"
            "n1 = input x1\nn2 = input x2\ng1 = guess y1\n"
            "a1 = and n1 n2\na2 = and a1 g1\noutput a2\n");
  run::spit(path("unsat.cir"),
            "var x1\nn1 = input x1\nn2 = not n1\na1 = and n1 n2\noutput a1\n");
  run::spit(path("broken.cir"), "var x1\nn1 = and q q\noutput n1\n");

  // worked example 1: circuit measures
  {
    run::Result r = run::cmd(bwc + " stats " + path("not.cir"));
    expect_eq(r.out, "n=1 m=0 s=1 depth=1 width=1\nmult x1=1\n", "stats bytes");
    expect(r.status == 0, "stats exit");
  }

  // worked example 2: trace validation
  {
    run::Result r =
        run::cmd(bwc + " pebble-validate " + path("path.graph") + " " + path("path.trace"));
    expect_eq(r.out, "ok time=5 space=2\n", "pebble-validate bytes");
    expect(r.status == 0, "pebble-validate exit");
  }

  // worked example 3: the two solving methods agree byte for byte
  {
    run::Result brute = run::cmd(bwc + " sat " + path("conj.cir") + " --method brute");
    run::Result width = run::cmd(bwc + " sat " + path("conj.cir") + " --method width");
    expect_eq(brute.out, "satisfiable\nx1=1\nx2=1\ny1=1\n", "sat brute bytes");
    expect_eq(width.out, brute.out, "sat method agreement");
    expect(brute.status == 0 && width.status == 0, "sat exit");
  }

  // exit-code contract: 0 ok, 1 domain, 2 usage, 10 unsatisfiable
  {
    expect(run::cmd(bwc + " nosuch").status == 2, "unknown subcommand is usage error");
    expect(run::cmd(bwc + " stats --bogus " + path("not.cir")).status == 2,
           "unknown flag is usage error");
    expect(run::cmd(bwc + " stats " + path("broken.cir")).status == 1,
           "parse failure is domain error");
    run::Result broken = run::cmd(bwc + " stats " + path("broken.cir"));
    expect(!broken.err.empty() && broken.out.empty(),
           "diagnostics go to the error stream");
    expect(run::cmd(bwc + " stats " + path("missing.cir")).status == 1,
           "missing file is domain error");
    expect(run::cmd(bwc + " sat " + path("unsat.cir")).status == 10, "unsat exit");
    run::Result uns = run::cmd(bwc + " sat " + path("unsat.cir"));
    expect_eq(uns.out, "unsatisfiable\n", "unsat bytes");
    expect(run::cmd(bwc + " sat " + path("conj.cir") + " --backend dpll").status == 1,
           "unknown backend is domain error");
  }

  // a rejected trace reports the breach on stderr and exits 1
  {
    run::spit(path("bad.trace"), "B+ b\n");
    run::Result r =
        run::cmd(bwc + " pebble-validate " + path("path.graph") + " " + path("bad.trace"));
    expect(r.status == 1, "violation exit");
    expect(r.out.empty(), "violation stdout empty");
    expect(r.err.find("rule=1") != std::string::npos, "violation names the rule");
  }

  // layer round trip: same measures, same function
  {
    run::Result lay = run::cmd(bwc + " layer " + path("not.cir") + " -o " + path("not.lay"));
    expect(lay.status == 0, "layer exit");
    run::Result s1 = run::cmd(bwc + " stats " + path("not.cir"));
    run::Result s2 = run::cmd(bwc + " stats " + path("not.lay"));
    expect_eq(s2.out, s1.out, "layer keeps the measures");
    run::Result e1 = run::cmd(bwc + " eval " + path("not.lay") + " --assign x1=0");
    expect_eq(e1.out, "1\n", "layered circuit evaluates");
  }

  // evaluation resolves guesses existentially
  {
    run::Result hit = run::cmd(bwc + " eval " + path("conj.cir") + " --assign x1=1,x2=1");
    expect_eq(hit.out, "1\n", "eval guess hit");
    run::Result miss = run::cmd(bwc + " eval " + path("conj.cir") + " --assign x1=0,x2=1");
    expect_eq(miss.out, "0\n", "eval guess miss");
  }

  // program conversion report block
  {
    run::Result r = run::cmd(bwc + " to-bp " + path("not.cir") + " -o " + path("not.bp"));
    expect_eq(r.out, "s=1\nw=1\nn=1\nm=0\nout_size=3\nout_width=1\nbound=size<=10\nok=1\n",
              "to-bp report bytes");
    expect(r.status == 0, "to-bp exit");
  }

  // generation, search and compilation compose through files
  {
    run::Result g = run::cmd(bwc + " pebble-gen path 3 -o " + path("p3"));
    expect_eq(g.out, "vertices=3 moves=5 space=2\n", "pebble-gen bytes");
    run::Result v =
        run::cmd(bwc + " pebble-validate " + path("p3.graph") + " " + path("p3.trace"));
    expect_eq(v.out, "ok time=5 space=2\n", "generated trace validates");
    run::Result s =
        run::cmd(bwc + " pebble-search " + path("p3.graph") + " -o " + path("p3.best"));
    expect_eq(s.out, "space=2 time=5\n", "pebble-search bytes");
    run::Result v2 =
        run::cmd(bwc + " pebble-validate " + path("p3.graph") + " " + path("p3.best"));
    expect(v2.status == 0, "search witness validates");
  }

  // depth reduction emits an equivalent circuit
  {
    std::string chain = "var x1\ni1 = input x1\n";
    std::string prev = "i1";
    for (int i = 1; i <= 8; ++i) {
      chain += "m" + std::to_string(i) + " = not " + prev + "\n";
      prev = "m" + std::to_string(i);
    }
    chain += "output " + prev + "\n";
    run::spit(path("chain.cir"), chain);
    run::Result d = run::cmd(bwc + " depth-reduce " + path("chain.cir") +
                             " --target 4 -o " + path("chain.red"));
    expect(d.status == 0, "depth-reduce exit");
    for (int v = 0; v < 2; ++v) {
      std::string a = " --assign x1=" + std::to_string(v);
      run::Result e1 = run::cmd(bwc + " eval " + path("chain.cir") + a);
      run::Result e2 = run::cmd(bwc + " eval " + path("chain.red") + a);
      expect_eq(e2.out, e1.out, "depth-reduce keeps the function");
    }
  }

  if (failures == 0) std::printf("cli_golden: all checks passed\n");
  return failures == 0 ? 0 : 1;
}
