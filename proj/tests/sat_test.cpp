#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <atomic>

#include "doctest.h"
#include "bwc/sat.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

using namespace bwc;

namespace {

Circuit parse(const std::string& text) { return parse_circuit(text); }

// truth-table scan with the reference interpreter
bool oracle_sat(const Circuit& c) {
  int n = (int)c.actual_vars.size();
  for (int mask = 0; mask < (1 << n); ++mask)
    if (oracle::eval_exists(c, oracle::mask_assignment(c.actual_vars, mask)))
      return true;
  return false;
}

}  // namespace

TEST_CASE("constant outputs") {
  Circuit one = parse("k = const 1\noutput k\n");
  SatResult r1 = brute_force_sat(one);
  CHECK(r1.satisfiable);
  REQUIRE(r1.witness.has_value());
  CHECK(r1.witness->bindings.empty());

  SatResult w1 = bounded_width_sat(one);
  CHECK(w1.satisfiable);

  Circuit zero = parse("k = const 0\noutput k\n");
  SatResult w0 = bounded_width_sat(zero);
  CHECK_FALSE(w0.satisfiable);
  CHECK(w0.stats.conversions == 0);
}

TEST_CASE("a contradiction is unsatisfiable") {
  Circuit c = parse(
      "var x1\na = input x1\nb = input x1\nn = not b\ng = and a n\noutput g\n");
  CHECK_FALSE(brute_force_sat(c).satisfiable);
  CHECK_FALSE(bounded_width_sat(c).satisfiable);
}

TEST_CASE("witnesses come in lexicographic order") {
  Circuit c = parse("var x1\nvar x2\na = input x2\noutput a\n");
  SatResult r = brute_force_sat(c);
  REQUIRE(r.satisfiable);
  CHECK(r.witness->bindings.at("x1") == 0);
  CHECK(r.witness->bindings.at("x2") == 1);
}

TEST_CASE("brute force rejects oversized instances") {
  Circuit c;
  for (int i = 1; i <= 23; ++i) c.actual_vars.push_back("x" + std::to_string(i));
  Node in;
  in.id = "a";
  in.kind = NodeKind::Input;
  in.var = "x1";
  c.nodes.push_back(in);
  c.output = 0;
  CHECK_THROWS_AS(brute_force_sat(c), Error);
}

TEST_CASE("variable selection prefers low multiplicities") {
  // x1 is read 10 times, x2..x4 once each
  std::string text = "var x1\nvar x2\nvar x3\nvar x4\n";
  for (int i = 1; i <= 10; ++i)
    text += "a" + std::to_string(i) + " = input x1\n";
  text += "b2 = input x2\nb3 = input x3\nb4 = input x4\n";
  text += "g1 = and a1 a2\ng2 = and b2 b3\ng3 = and g1 g2\ng4 = and g3 b4\n";
  text += "output g4\n";
  Circuit c = parse(text);
  auto [vars, k] = choose_read_k_vars(c);
  CHECK(vars == std::vector<std::string>{"x2", "x3"});
  CHECK(k == 1);
}

TEST_CASE("uniform multiplicities give k = 1") {
  Circuit c = parse(
      "var x1\nvar x2\nvar x3\nvar x4\n"
      "a = input x1\nb = input x2\nc = input x3\nd = input x4\n"
      "g1 = and a b\ng2 = and c d\ng3 = and g1 g2\noutput g3\n");
  auto [vars, k] = choose_read_k_vars(c);
  CHECK(vars.size() == 2);
  CHECK(k == 1);

  SatResult r = bounded_width_sat(c);
  REQUIRE(r.satisfiable);
  CHECK(r.stats.k == 1);
  for (const auto& v : c.actual_vars) CHECK(r.witness->bindings.at(v) == 1);
}

TEST_CASE("the selection guarantee holds on random circuits") {
  gen::Rng r(3001);
  for (int i = 0; i < 200; ++i) {
    int n = gen::pick(r, 1, 8);
    Circuit c = gen::random_circuit(r, n, 0, gen::pick(r, 1, 30));
    auto [vars, k] = choose_read_k_vars(c);
    CHECK((int)vars.size() == (n + 1) / 2);
    long long total = 0;
    for (const auto& [v, cnt] : read_multiplicities(c)) total += cnt;
    CHECK(k <= (2 * total + n - 1) / n);
  }
}

TEST_CASE("both methods agree and produce sound witnesses") {
  gen::Rng r(3002);
  for (int i = 0; i < 60; ++i) {
    int n = gen::pick(r, 1, 8);
    int m = gen::pick(r, 0, 3);
    Circuit c = gen::random_circuit(r, n, m, gen::pick(r, 1, 30));
    SatResult brute = brute_force_sat(c);
    SatResult width = bounded_width_sat(c);
    CHECK(brute.satisfiable == width.satisfiable);
    CHECK(brute.satisfiable == oracle_sat(c));
    if (width.satisfiable) {
      CHECK(oracle::eval_total(c, *width.witness) == 1);
      CHECK(oracle::eval_total(c, *brute.witness) == 1);
    }
  }
}

TEST_CASE("parallel runs return the single-threaded result") {
  gen::Rng r(3003);
  for (int i = 0; i < 30; ++i) {
    int n = gen::pick(r, 2, 8);
    Circuit c = gen::random_circuit(r, n, gen::pick(r, 0, 2), gen::pick(r, 1, 25));
    SatResult serial = bounded_width_sat(c, {}, {}, 1);
    SatResult parallel = bounded_width_sat(c, {}, {}, 4);
    CHECK(serial.satisfiable == parallel.satisfiable);
    CHECK(serial.stats == parallel.stats);
    if (serial.satisfiable)
      CHECK(serial.witness->bindings == parallel.witness->bindings);
  }
}

TEST_CASE("the backend seam is honored") {
  std::atomic<int> calls{0};
  BpSatBackend counting = [&](const BranchingProgram& bp,
                              const std::vector<std::string>& free_vars) {
    ++calls;
    return enumerating_backend(bp, free_vars);
  };
  Circuit c = parse(
      "var x1\nvar x2\nvar x3\n"
      "a = input x1\nb = input x2\nc = input x3\n"
      "g1 = and a b\ng2 = and g1 c\noutput g2\n");
  SatResult r = bounded_width_sat(c, {}, counting);
  REQUIRE(r.satisfiable);
  CHECK(oracle::eval_total(c, *r.witness) == 1);
  CHECK(calls.load() == r.stats.conversions);
  CHECK(calls.load() > 0);
}

TEST_CASE("width and guess caps are enforced") {
  // thirteen parallel readers of one shared input node, all kept live by
  // an or-fold: the first layer alone is 13 wide
  std::string wide = "var x1\ni1 = input x1\n";
  for (int i = 1; i <= 13; ++i) wide += "m" + std::to_string(i) + " = not i1\n";
  std::string acc2 = "m1";
  for (int i = 2; i <= 13; ++i) {
    wide += "o" + std::to_string(i) + " = or " + acc2 + " m" + std::to_string(i) + "\n";
    acc2 = "o" + std::to_string(i);
  }
  wide += "output " + acc2 + "\n";
  CHECK_THROWS_AS(bounded_width_sat(parse(wide)), Error);

  std::string guessy;
  for (int i = 1; i <= 21; ++i) guessy += "guess y" + std::to_string(i) + "\n";
  for (int i = 1; i <= 21; ++i)
    guessy += "u" + std::to_string(i) + " = guess y" + std::to_string(i) + "\n";
  std::string acc = "u1";
  for (int i = 2; i <= 21; ++i) {
    guessy += "o" + std::to_string(i) + " = or " + acc + " u" + std::to_string(i) + "\n";
    acc = "o" + std::to_string(i);
  }
  guessy += "output " + acc + "\n";
  CHECK_THROWS_AS(brute_force_sat(parse(guessy)), Error);
}

TEST_CASE("stats describe the search") {
  Circuit c = parse(
      "var x1\nvar x2\nguess y1\n"
      "a = input x1\nb = input x2\nu = guess y1\n"
      "g1 = and a b\ng2 = and g1 u\noutput g2\n");
  SatResult r = bounded_width_sat(c);
  REQUIRE(r.satisfiable);
  CHECK(r.stats.k >= 1);
  CHECK((int)r.stats.chosen.size() == 1);
  CHECK(r.stats.assignments >= 1);
  CHECK(r.witness->bindings.at("y1") == 1);
}
