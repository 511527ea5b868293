#include <doctest.h>

#include "ctrl/smt2.hpp"
#include "helpers.hpp"

using namespace ctrl;
using testutil::brute_enum;

TEST_SUITE("smt2") {

TEST_CASE("minimal well-formed input") {
  auto parsed = parse_smt2(
      "(declare-const x (_ BitVec 8)) (assert (bvule x #x29)) "
      "; ctrl-target: x width=8\n");
  CHECK(parsed.state.inputs.size() == 1);
  CHECK(parsed.state.inputs[0].name == "x");
  CHECK(parsed.state.inputs[0].width == 8);
  CHECK(parsed.state.constraints.size() == 1);
  REQUIRE(parsed.target.has_value());
  CHECK(parsed.target->width == 8);
  CHECK(to_smt2(parsed.target->expr) == "x");
}

TEST_CASE("undeclared variable is rejected") {
  CHECK_THROWS_AS(parse_smt2("(declare-const y (_ BitVec 8)) "
                             "(assert (bvult x y))"),
                  ParseError);
}

TEST_CASE("syntax errors carry positions") {
  try {
    parse_smt2("(declare-const x (_ BitVec 8))\n(assert (bvule x ))");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("width mismatches are rejected") {
  CHECK_THROWS_AS(parse_smt2("(declare-const x (_ BitVec 8))"
                             "(declare-const y (_ BitVec 16))"
                             "(assert (bvule x y))"),
                  ParseError);
}

TEST_CASE("unsupported constructs are rejected, not dropped") {
  CHECK_THROWS_AS(parse_smt2("(declare-const x Int)"), ParseError);
  CHECK_THROWS_AS(parse_smt2("(declare-const x (_ BitVec 8))"
                             "(assert (let ((y x)) (bvule y x)))"),
                  ParseError);
  CHECK_THROWS_AS(parse_smt2("(push 1)"), ParseError);
  CHECK_THROWS_AS(parse_smt2("(declare-const x (_ BitVec 128))"), ParseError);
}

TEST_CASE("array declarations and asserts pass through") {
  auto parsed = parse_smt2(
      "(declare-const m (Array (_ BitVec 8) (_ BitVec 8)))\n"
      "(declare-const x (_ BitVec 8))\n"
      "(assert (= (select m x) #x01))\n"
      "(assert (bvule x #x10))\n");
  CHECK(parsed.state.array_decls.size() == 1);
  CHECK(parsed.state.array_decls[0].first == "m");
  CHECK(parsed.state.array_asserts.size() == 1);
  CHECK(parsed.state.constraints.size() == 1);
  CHECK(parsed.state.has_arrays());

  // undeclared symbols inside passthrough asserts are still errors
  CHECK_THROWS_AS(
      parse_smt2("(declare-const m (Array (_ BitVec 8) (_ BitVec 8)))"
                 "(assert (= (select m q) #x01))"),
      ParseError);
}

TEST_CASE("target annotation with a compound term") {
  auto parsed = parse_smt2(
      "(declare-const a (_ BitVec 8))\n"
      "(declare-const b (_ BitVec 8))\n"
      "(assert (bvule a b))\n"
      "; ctrl-target: (bvadd a b) width=8\n");
  REQUIRE(parsed.target.has_value());
  CHECK(to_smt2(parsed.target->expr) == "(bvadd a b)");
}

TEST_CASE("target width disagreement is rejected") {
  CHECK_THROWS_AS(parse_smt2("(declare-const a (_ BitVec 8))\n"
                             "; ctrl-target: a width=16\n"),
                  ParseError);
}

TEST_CASE("assume annotation builds a value set") {
  auto parsed = parse_smt2(
      "(declare-const x (_ BitVec 8))\n"
      "; ctrl-target: x width=8\n"
      "; ctrl-assume: (and (bvule #x01 ctrl.v) (bvule ctrl.v #x29))\n");
  REQUIRE(parsed.target.has_value());
  REQUIRE(parsed.target->assumption.has_value());
  const ValueSet& a = *parsed.target->assumption;
  CHECK(a.intervals == std::vector<std::pair<Word, Word>>{{1, 0x29}});
  CHECK(!a.fixed.has_value());
}

TEST_CASE("assume annotation with fixed bits and a union") {
  auto parsed = parse_smt2(
      "(declare-const x (_ BitVec 8))\n"
      "; ctrl-target: x width=8\n"
      "; ctrl-assume: (and (or (and (bvule #x00 ctrl.v) (bvule ctrl.v #x10)) "
      "(and (bvule #x20 ctrl.v) (bvule ctrl.v #x30))) "
      "(= (bvand ctrl.v #x01) #x00))\n");
  const ValueSet& a = *parsed.target->assumption;
  CHECK(a.intervals.size() == 2);
  REQUIRE(a.fixed.has_value());
  CHECK(a.fixed->mask == 1);
  CHECK(a.fixed->bits == 0);
}

TEST_CASE("round trip preserves feasible sets") {
  const char* text =
      "(declare-const hdr (_ BitVec 8))\n"
      "(declare-const input_size (_ BitVec 8))\n"
      "(assert (bvule hdr #x29))\n"
      "(assert (bvult #x18 input_size))\n"
      "(assert (bvult #x10 hdr))\n"
      "; ctrl-target: hdr width=8\n";
  auto parsed = parse_smt2(text);
  REQUIRE(parsed.target.has_value());

  auto before = brute_enum(parsed.state, parsed.target->expr);
  // the scaled parser feasible set
  std::vector<Word> expected;
  for (Word v = 17; v <= 41; ++v) expected.push_back(v);
  CHECK(before == expected);

  auto reparsed = parse_smt2(to_file_text(parsed.state, *parsed.target));
  REQUIRE(reparsed.target.has_value());
  CHECK(brute_enum(reparsed.state, reparsed.target->expr) == before);
}

TEST_CASE("serialize is empty-state safe") {
  SymState empty;
  const std::string text = serialize_smt2(empty);
  CHECK(text == "(set-logic BV)\n");
  auto parsed = parse_smt2(text);
  CHECK(parsed.state.inputs.empty());
  CHECK(parsed.state.constraints.empty());
}

TEST_CASE("forced unique model after round trip") {
  // x + 1 = 0 over 8 bits pins x to 255
  SymState s = testutil::one_var_state("x", 8);
  s.constraints.push_back(
      mk_eq(mk_bin(Op::Add, mk_var("x", 8), mk_const(1, 8)), mk_const(0, 8)));
  auto parsed = parse_smt2(serialize_smt2(s));
  auto values = brute_enum(parsed.state, mk_var("x", 8));
  CHECK(values == std::vector<Word>{255});
}

TEST_CASE("random round trips preserve target sets") {
  testutil::TestRng rng(123);
  for (int round = 0; round < 25; ++round) {
    auto sys = testutil::random_system(rng);
    auto before = brute_enum(sys.state, sys.target.expr);
    auto reparsed = parse_smt2(to_file_text(sys.state, sys.target));
    REQUIRE(reparsed.target.has_value());
    CHECK(brute_enum(reparsed.state, reparsed.target->expr) == before);
  }
}

TEST_CASE("duplicate annotations are rejected") {
  CHECK_THROWS_AS(parse_smt2("(declare-const x (_ BitVec 8))\n"
                             "; ctrl-target: x width=8\n"
                             "; ctrl-target: x width=8\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_smt2("(declare-const x (_ BitVec 8))\n"
                             "; ctrl-assume: (bvule ctrl.v #x10)\n"),
                  ParseError);
}

}  // TEST_SUITE
