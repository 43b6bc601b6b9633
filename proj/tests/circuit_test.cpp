#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <set>

#include "doctest.h"
#include "bwc/circuit.hpp"
#include "bwc/conversions.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

using namespace bwc;

namespace {

Circuit parse(const std::string& text) { return parse_circuit(text); }

Assignment bits(const std::string& text) { return parse_assignment(text); }

const char* kAnd2 =
    "var x1\nvar x2\n"
    "a = input x1\nb = input x2\n"
    "g = and a b\noutput g\n";

}  // namespace

TEST_CASE("parse minimal program") {
  Circuit c = parse("var x1\ng1 = input x1\nn1 = not g1\noutput n1\n");
  CHECK(c.nodes.size() == 2);
  CHECK(c.size() == 1);
  CHECK(c.actual_vars == std::vector<std::string>{"x1"});
  CHECK(c.nodes[0].kind == NodeKind::Input);
  CHECK(c.nodes[1].kind == NodeKind::Not);
  CHECK(c.output == 1);
  CHECK(parse(serialize(c)) == c);
}

TEST_CASE("parse rejects self reference") {
  CHECK_THROWS_AS(parse("var x1\nn1 = and n1 n1\noutput n1\n"), ParseError);
}

TEST_CASE("parse rejects duplicate guess nodes") {
  CHECK_THROWS_AS(
      parse("guess y1\na = guess y1\nb = guess y1\ng = and a b\noutput g\n"),
      Error);
}

TEST_CASE("parse rejects duplicate ids and missing output") {
  CHECK_THROWS_AS(parse("var x1\na = input x1\na = not a\noutput a\n"), Error);
  CHECK_THROWS_AS(parse("var x1\na = input x1\n"), Error);
}

TEST_CASE("parse errors carry positions") {
  try {
    parse("var x1\na = nope x1\noutput a\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("assignment parsing") {
  Assignment a = bits("x1=1,x2=0");
  CHECK(a.at("x1") == 1);
  CHECK(a.at("x2") == 0);
  CHECK_THROWS_AS(bits("x1=1,x1=0"), Error);
  CHECK_THROWS_AS(bits("x1=2"), Error);
  CHECK_THROWS_AS(bits("x1"), Error);
}

TEST_CASE("evaluate conjunction") {
  Circuit c = parse(kAnd2);
  for (int m = 0; m < 4; ++m) {
    Assignment a = oracle::mask_assignment(c.actual_vars, m);
    CHECK(evaluate(c, a) == (a.at("x1") && a.at("x2")));
  }
}

TEST_CASE("evaluate folds constants") {
  Circuit c = parse("k = const 0\nn = not k\noutput n\n");
  CHECK(evaluate(c, Assignment{}) == 1);
}

TEST_CASE("evaluate rejects guesses and unbound variables") {
  Circuit g = parse("guess y1\na = guess y1\noutput a\n");
  CHECK_THROWS_AS(evaluate(g, Assignment{}), Error);
  Circuit c = parse(kAnd2);
  CHECK_THROWS_AS(evaluate(c, bits("x1=1")), Error);
}

TEST_CASE("evaluate matches the reference interpreter") {
  gen::Rng r(1001);
  for (int i = 0; i < 1000; ++i) {
    int n = gen::pick(r, 1, 6);
    Circuit c = gen::random_circuit(r, n, 0, gen::pick(r, 1, 20));
    for (int t = 0; t < 4; ++t) {
      Assignment a = oracle::mask_assignment(c.actual_vars, gen::pick(r, 0, (1 << n) - 1));
      CHECK(evaluate(c, a) == oracle::eval_total(c, a));
    }
  }
}

TEST_CASE("nondeterministic evaluation") {
  Circuit free_bit = parse("guess y1\na = guess y1\noutput a\n");
  CHECK(evaluate_nondet(free_bit, Assignment{}) == 1);

  Circuit forced = parse(
      "var x1\nguess y1\na = input x1\nb = guess y1\ng = and a b\noutput g\n");
  CHECK(evaluate_nondet(forced, bits("x1=0")) == 0);
  CHECK(evaluate_nondet(forced, bits("x1=1")) == 1);

  Circuit contra = parse(
      "guess y1\na = guess y1\nb = not a\ng = and a b\noutput g\n");
  CHECK(evaluate_nondet(contra, Assignment{}) == 0);
}

TEST_CASE("nondeterministic evaluation enforces the guess cap") {
  std::string text;
  for (int i = 1; i <= 21; ++i) text += "guess y" + std::to_string(i) + "\n";
  for (int i = 1; i <= 21; ++i)
    text += "a" + std::to_string(i) + " = guess y" + std::to_string(i) + "\n";
  std::string acc = "a1";
  for (int i = 2; i <= 21; ++i) {
    text += "o" + std::to_string(i) + " = or " + acc + " a" + std::to_string(i) + "\n";
    acc = "o" + std::to_string(i);
  }
  text += "output " + acc + "\n";
  Circuit c = parse(text);
  CHECK_THROWS_AS(evaluate_nondet(c, Assignment{}), Error);
  CHECK(evaluate_nondet(c, Assignment{}, 21) == 1);
}

TEST_CASE("nondeterministic evaluation matches the reference interpreter") {
  gen::Rng r(1002);
  for (int i = 0; i < 300; ++i) {
    int n = gen::pick(r, 1, 4);
    Circuit c = gen::random_circuit(r, n, gen::pick(r, 0, 3), gen::pick(r, 1, 15));
    for (int m = 0; m < (1 << n); ++m) {
      Assignment a = oracle::mask_assignment(c.actual_vars, m);
      CHECK(evaluate_nondet(c, a) == oracle::eval_exists(c, a));
    }
  }
}

TEST_CASE("restrict folds absorbing and identity constants") {
  Circuit c = parse(kAnd2);
  Circuit zero = restrict_circuit(c, bits("x1=0"));
  CHECK(zero.nodes[zero.output].kind == NodeKind::Const);
  CHECK(zero.nodes[zero.output].value == 0);

  Circuit pass = restrict_circuit(c, bits("x1=1"));
  CHECK(pass.size() <= c.size());
  CHECK(evaluate(pass, bits("x2=0")) == 0);
  CHECK(evaluate(pass, bits("x2=1")) == 1);
}

TEST_CASE("restrict rejects non-actual names") {
  Circuit c = parse(kAnd2);
  CHECK_THROWS_AS(restrict_circuit(c, bits("zz=1")), Error);
}

TEST_CASE("restrict preserves the function on all completions") {
  gen::Rng r(1003);
  for (int i = 0; i < 300; ++i) {
    int n = gen::pick(r, 2, 5);
    Circuit c = gen::random_circuit(r, n, gen::pick(r, 0, 2), gen::pick(r, 1, 15));
    int bound = gen::pick(r, 1, n - 1);
    Assignment partial;
    for (int b = 0; b < bound; ++b)
      partial.bindings["x" + std::to_string(b + 1)] = gen::chance(r, 0.5);
    Circuit res = restrict_circuit(c, partial);
    CHECK(res.size() <= c.size());
    std::vector<std::string> rest;
    for (const auto& v : c.actual_vars)
      if (!partial.has(v)) rest.push_back(v);
    for (int m = 0; m < (1 << rest.size()); ++m) {
      Assignment a = oracle::mask_assignment(rest, m);
      Assignment full = a;
      for (const auto& [k, v] : partial.bindings) full.bindings[k] = v;
      CHECK(evaluate_nondet(res, a) == evaluate_nondet(c, full));
    }
  }
}

TEST_CASE("layer assigns gate depths") {
  Circuit c = parse(
      "var x1\nvar x2\nvar x3\nvar x4\n"
      "a = input x1\nb = input x2\nc = input x3\nd = input x4\n"
      "g1 = and a b\ng2 = and c d\ng3 = or g1 g2\noutput g3\n");
  LayeredCircuit lc = layer(c);
  REQUIRE(lc.layers.size() == 2);
  CHECK(lc.layers[0].size() == 2);
  CHECK(lc.layers[1].size() == 1);
  CHECK(width(lc) == 2);
  CHECK(lc.base.copy_count() == 0);
}

TEST_CASE("layer exempts input edges from adjacency") {
  Circuit c = parse(
      "var x1\nvar x2\nvar x3\n"
      "a = input x1\nb = input x2\nc = input x3\n"
      "g1 = and b c\ng2 = and a g1\noutput g2\n");
  LayeredCircuit lc = layer(c);
  CHECK(width(lc) == 1);
  CHECK(lc.base.copy_count() == 0);
  CHECK(lc.layers.size() == 2);
}

TEST_CASE("layer inserts one copy chain per spanning edge source") {
  Circuit c = parse(
      "var x1\nvar x2\nvar x3\nvar x4\n"
      "a = input x1\nb = input x2\nc = input x3\nd = input x4\n"
      "g = and a b\nh1 = and g c\nh2 = and h1 d\ntop = or g h2\n"
      "output top\n");
  LayeredCircuit lc = layer(c);
  CHECK(lc.base.copy_count() == 2);
  CHECK(lc.base.size() == c.size());
  for (int m = 0; m < 16; ++m) {
    Assignment a = oracle::mask_assignment(c.actual_vars, m);
    CHECK(evaluate(lc.base, a) == oracle::eval_total(c, a));
  }
}

TEST_CASE("layer preserves the function and the gate count") {
  gen::Rng r(1004);
  for (int i = 0; i < 200; ++i) {
    int n = gen::pick(r, 1, 5);
    int m = gen::pick(r, 0, 2);
    Circuit c = gen::random_circuit(r, n, m, gen::pick(r, 1, 18));
    LayeredCircuit lc = layer(c);
    validate_layered(lc);
    CHECK(lc.base.size() == c.size());
    CHECK(width(lc) >= 1);
    for (int mask = 0; mask < (1 << n); ++mask) {
      Assignment a = oracle::mask_assignment(c.actual_vars, mask);
      CHECK(evaluate_nondet(lc.base, a) == oracle::eval_exists(c, a));
    }
    LayeredCircuit back = parse_layered(serialize(lc));
    CHECK(back == lc);
  }
}

TEST_CASE("width counts gates per layer") {
  Circuit one = parse("var x1\na = input x1\nn = not a\noutput n\n");
  CHECK(width(layer(one)) == 1);

  std::string text = "var x1\nvar x2\na = input x1\nb = input x2\n";
  for (int i = 1; i <= 5; ++i)
    text += "g" + std::to_string(i) + " = and a b\n";
  text += "output g1\n";
  Circuit k = parse(text);
  CHECK(width(layer(k)) == 5);
}

TEST_CASE("width of the height-3 pyramid matches the dense row") {
  // rows above the inputs hold 3, 2, 1 gates; the dense row has 3
  Circuit c = family_circuit(StrategyFamily::Pyramid, 3);
  CHECK(width(layer(c)) == 3);
}

TEST_CASE("read multiplicities count nodes not wires") {
  Circuit two = parse(
      "var x1\na = input x1\nb = input x1\ng = and a b\noutput g\n");
  CHECK(read_multiplicities(two).at("x1") == 2);

  Circuit one = parse("var x1\na = input x1\ng = and a a\noutput g\n");
  CHECK(read_multiplicities(one).at("x1") == 1);

  Circuit unread = parse("var x1\nvar x2\na = input x1\nn = not a\noutput n\n");
  CHECK(read_multiplicities(unread).at("x2") == 0);
}

TEST_CASE("input node slots stay within the generator bound") {
  gen::Rng r(1005);
  for (int i = 0; i < 200; ++i) {
    int n = gen::pick(r, 1, 5);
    int gates = gen::pick(r, std::max(1, n - 1), 20);
    Circuit c = gen::random_circuit(r, n, 0, gates, 0, gates + 1);
    int total = 0;
    for (const auto& [v, k] : read_multiplicities(c)) total += k;
    CHECK(total <= c.size() + 1);
  }
}

TEST_CASE("depth measures the longest gate path") {
  CHECK(depth(parse("var x1\na = input x1\nn = not a\noutput n\n")) == 1);
  CHECK(depth(parse("var x1\na = input x1\nn1 = not a\nn2 = not n1\noutput n2\n")) == 2);
  // balanced tree over 8 leaves
  CHECK(depth(family_circuit(StrategyFamily::BinaryTree, 3)) == 3);
}

TEST_CASE("round trip on random circuits") {
  gen::Rng r(1006);
  for (int i = 0; i < 200; ++i) {
    Circuit c = gen::random_circuit(r, gen::pick(r, 1, 6), gen::pick(r, 0, 2),
                                    gen::pick(r, 0, 20));
    CHECK(parse(serialize(c)) == c);
  }
}

TEST_CASE("parse_layered requires the trailer") {
  CHECK_THROWS_AS(parse_layered("var x1\na = input x1\nn = not a\noutput n\n"),
                  Error);
  LayeredCircuit lc = parse_layered(
      "var x1\na = input x1\nn = not a\noutput n\nlayer 1: n\n");
  CHECK(width(lc) == 1);
}
