#include <doctest.h>

#include "ctrl/fixtures.hpp"
#include "ctrl/sns.hpp"
#include "ctrl/toy.hpp"
#include "helpers.hpp"

using namespace ctrl;
using namespace ctrl::toy;
using testutil::brute_enum;

namespace {

const Fixture& fx(const char* name) { return fixture_by_name(name); }

SinkState single_sink(const Fixture& fixture) {
  ToyProgram program = parse_toy(fixture.ir_text);
  auto sinks = symbolic_single_path(program, fixture.triggering_input);
  REQUIRE(sinks.size() >= 1);
  return sinks[0];
}

}  // namespace

TEST_SUITE("toy") {

TEST_CASE("straight-line execution") {
  ToyProgram p = parse_toy("input x:8\nv := x\nsink out v\n");
  ConcreteTrace t = execute_concrete(p, {{"x", 5}});
  REQUIRE(t.sinks.size() == 1);
  CHECK(t.sinks[0].label == "out");
  CHECK(t.sinks[0].value == 5);
}

TEST_CASE("parser rejects malformed programs") {
  CHECK_THROWS_AS(parse_toy("input x\n"), ParseError);
  CHECK_THROWS_AS(parse_toy("input x:8\nv := y\n"), ParseError);
  CHECK_THROWS_AS(parse_toy("input x:8\nif x {\n}\n"), ParseError);  // non-bool
  CHECK_THROWS_AS(parse_toy("input x:8\nv := x\nv := (concat x x)\n"),
                  ParseError);  // width change
  CHECK_THROWS_AS(parse_toy("input x:8\nsink s (bvule x x)\n"), ParseError);
  CHECK_THROWS_AS(parse_toy("input x:8\n}\n"), ParseError);
}

TEST_CASE("branches, memory and repeat") {
  const char* text =
      "input x:8\n"
      "mem 16\n"
      "acc := #x00\n"
      "repeat 3 {\n"
      "  acc := (bvadd acc x)\n"
      "}\n"
      "store #x02 acc\n"
      "v := load #x02\n"
      "big := (bvugt v #x20)\n"
      "if big {\n"
      "  sink large v\n"
      "} else {\n"
      "  sink small v\n"
      "}\n";
  ToyProgram p = parse_toy(text);
  ConcreteTrace big = execute_concrete(p, {{"x", 20}});
  REQUIRE(big.sinks.size() == 1);
  CHECK(big.sinks[0].label == "large");
  CHECK(big.sinks[0].value == 60);
  ConcreteTrace small = execute_concrete(p, {{"x", 1}});
  REQUIRE(small.sinks.size() == 1);
  CHECK(small.sinks[0].label == "small");
  CHECK(small.sinks[0].value == 3);
}

TEST_CASE("out-of-range access traps") {
  ToyProgram p = parse_toy(
      "input x:8\nmem 16\nstore x #x01\nsink after x\n");
  ConcreteTrace ok = execute_concrete(p, {{"x", 3}});
  CHECK(!ok.trap.has_value());
  CHECK(ok.sinks.size() == 1);
  ConcreteTrace bad = execute_concrete(p, {{"x", 200}});
  REQUIRE(bad.trap.has_value());
  CHECK(bad.trap->address == 200);
  CHECK(bad.sinks.empty());  // execution stops at the trap
}

TEST_CASE("motex concrete runs") {
  ToyProgram p = parse_toy(fx("motex2-8bit").ir_text);
  // residue path: the sink sees the header byte itself
  ConcreteTrace residue = execute_concrete(p, {{"hdr", 17}, {"input_size", 25}});
  REQUIRE(residue.sinks.size() == 1);
  CHECK(residue.sinks[0].value == 17);
  // underflow path wraps below the header size
  ConcreteTrace wrap = execute_concrete(p, {{"hdr", 0}, {"input_size", 7}});
  REQUIRE(wrap.sinks.size() == 1);
  CHECK(wrap.sinks[0].value == 255);  // 7 - 8 mod 256
  // full-width twin, same shape
  ToyProgram p64 = parse_toy(fx("motex2-64bit").ir_text);
  ConcreteTrace big = execute_concrete(p64, {{"hdr", 257}, {"input_size", 297}});
  REQUIRE(big.sinks.size() == 1);
  CHECK(big.sinks[0].value == 257);
  ConcreteTrace under = execute_concrete(p64, {{"hdr", 0}, {"input_size", 39}});
  REQUIRE(under.sinks.size() == 1);
  CHECK(under.sinks[0].value == ~Word{0});  // 39 - 40
}

TEST_CASE("symbolic replay emits the residue-path constraint system") {
  SinkState ss = single_sink(fx("motex2-8bit"));
  CHECK(ss.label == "of_wsize");
  // triggering input satisfies the emitted state
  Model input = fx("motex2-8bit").triggering_input;
  for (const auto& c : ss.state.constraints) CHECK(eval(c, input) == 1);
  CHECK(eval(ss.target.expr, input) == ss.concrete_value);

  std::vector<Word> expected;
  for (Word v = 17; v <= 41; ++v) expected.push_back(v);
  CHECK(brute_enum(ss.state, ss.target.expr) == expected);
}

TEST_CASE("symbolic replay of the underflow path wraps high") {
  SinkState ss = single_sink(fx("motex1-8bit"));
  std::vector<Word> expected;
  for (Word v = 248; v <= 255; ++v) expected.push_back(v);
  CHECK(brute_enum(ss.state, ss.target.expr) == expected);
}

TEST_CASE("pinned branch kills weak control") {
  const char* text =
      "input x:8\n"
      "iszero := (= x #x00)\n"
      "if iszero {\n"
      "  sink pinned x\n"
      "}\n";
  ToyProgram p = parse_toy(text);
  auto sinks = symbolic_single_path(p, {{"x", 0}});
  REQUIRE(sinks.size() == 1);
  auto solver = make_solver({});
  CHECK(check_wc(sinks[0].state, sinks[0].target, *solver).verdict ==
        Tri::False);
}

TEST_CASE("doubling survives to the symbolic target") {
  SinkState ss = single_sink(fx("mul-8bit"));
  auto values = brute_enum(ss.state, ss.target.expr);
  CHECK(values.size() == 128);
  for (std::size_t i = 0; i < values.size(); ++i) CHECK(values[i] == 2 * i);
}

TEST_CASE("every fixture triggers its sinks and stays consistent") {
  for (const auto& fixture : builtin_fixtures()) {
    CAPTURE(fixture.name);
    ToyProgram p = parse_toy(fixture.ir_text);
    auto sinks = symbolic_single_path(p, fixture.triggering_input);
    REQUIRE(!sinks.empty());
    for (const auto& ss : sinks) {
      for (const auto& c : ss.state.constraints)
        CHECK(eval(c, fixture.triggering_input) == 1);
      CHECK(eval(ss.target.expr, fixture.triggering_input) ==
            ss.concrete_value);
    }
  }
}

TEST_CASE("path determinism") {
  const Fixture& fixture = fx("motex2-8bit");
  ToyProgram p = parse_toy(fixture.ir_text);
  ConcreteTrace t1 = execute_concrete(p, fixture.triggering_input);
  ConcreteTrace t2 = execute_concrete(p, fixture.triggering_input);
  CHECK(t1.executed_lines == t2.executed_lines);
  auto s1 = symbolic_single_path(p, fixture.triggering_input);
  auto s2 = symbolic_single_path(p, fixture.triggering_input);
  REQUIRE(s1.size() == s2.size());
  for (std::size_t i = 0; i < s1.size(); ++i) {
    CHECK(expr_equal(s1[i].target.expr, s2[i].target.expr));
    REQUIRE(s1[i].state.constraints.size() == s2[i].state.constraints.size());
    for (std::size_t j = 0; j < s1[i].state.constraints.size(); ++j)
      CHECK(expr_equal(s1[i].state.constraints[j], s2[i].state.constraints[j]));
  }
}

TEST_CASE("taint sources and basic propagation") {
  ToyProgram p = parse_toy("input x:8\nv := x\nsink out v\n");
  auto tags = taint_propagate(p, {{"x", 1}}, {});
  REQUIRE(tags.size() == 1);
  CHECK(tags[0].tainted);

  ToyProgram c = parse_toy("input x:8\nv := #x07\nsink out v\n");
  auto const_tags = taint_propagate(c, {{"x", 1}}, {});
  CHECK(!const_tags[0].tainted);
}

TEST_CASE("taint flows through memory") {
  ToyProgram p = parse_toy(
      "input x:8\nmem 16\nstore #x02 x\nv := load #x02\nsink out v\n");
  auto tags = taint_propagate(p, {{"x", 1}}, {});
  CHECK(tags[0].tainted);
  ToyProgram clean = parse_toy(
      "input x:8\nmem 16\nv := load #x02\nsink out v\n");
  CHECK(!taint_propagate(clean, {{"x", 1}}, {})[0].tainted);
}

TEST_CASE("listing3 keeps both sinks tainted while one is pinned") {
  const Fixture& fixture = fx("listing3-8bit");
  ToyProgram p = parse_toy(fixture.ir_text);
  auto solver = make_solver({});
  for (int mask = 0; mask < 8; ++mask) {
    TaintOptions opts;
    opts.control_flow = mask & 1;
    opts.address_overapprox = mask & 2;
    opts.suppression = mask & 4;
    auto tags = taint_propagate(p, fixture.triggering_input, opts);
    auto sinks = symbolic_single_path(p, fixture.triggering_input);
    REQUIRE(tags.size() == 2);
    REQUIRE(sinks.size() == 2);
    // line6_x: tainted yet not weakly controlled
    CHECK(tags[0].label == "line6_x");
    CHECK(tags[0].tainted);
    CHECK(check_wc(sinks[0].state, sinks[0].target, *solver).verdict ==
          Tri::False);
    // line8_w: tainted and genuinely controlled
    CHECK(tags[1].tainted);
    CHECK(check_wc(sinks[1].state, sinks[1].target, *solver).verdict ==
          Tri::True);
  }
}

TEST_CASE("suppression clears self-cancelling assignments") {
  const Fixture& fixture = fx("suppress-8bit");
  ToyProgram p = parse_toy(fixture.ir_text);
  TaintOptions off;
  auto plain = taint_propagate(p, fixture.triggering_input, off);
  CHECK(plain[0].tainted);  // q = x - x stays tagged without the option
  CHECK(plain[1].tainted);
  TaintOptions on;
  on.suppression = true;
  auto suppressed = taint_propagate(p, fixture.triggering_input, on);
  CHECK(!suppressed[0].tainted);
  CHECK(!suppressed[1].tainted);
}

TEST_CASE("equality-branch suppression pins the variable") {
  const char* text =
      "input x:8\n"
      "is7 := (= x #x07)\n"
      "if is7 {\n"
      "  sink pinned x\n"
      "}\n";
  ToyProgram p = parse_toy(text);
  TaintOptions on;
  on.suppression = true;
  // note: the branch condition itself is an assigned boolean here, so the
  // pinning applies to direct equality conditions only
  ToyProgram direct = parse_toy(
      "input x:8\nif (= x #x07) {\n  sink pinned x\n}\n");
  auto tags = taint_propagate(direct, {{"x", 7}}, on);
  REQUIRE(tags.size() == 1);
  CHECK(!tags[0].tainted);
  auto without = taint_propagate(direct, {{"x", 7}}, {});
  CHECK(without[0].tainted);
  (void)p;
}

TEST_CASE("control-flow option taints guarded writes") {
  const Fixture& fixture = fx("impflow-8bit");
  ToyProgram p = parse_toy(fixture.ir_text);
  auto basic = taint_propagate(p, fixture.triggering_input, {});
  CHECK(!basic[0].tainted);  // constant write
  TaintOptions cf;
  cf.control_flow = true;
  auto with_cf = taint_propagate(p, fixture.triggering_input, cf);
  CHECK(with_cf[0].tainted);  // guard depends on input
}

TEST_CASE("address over-approximation") {
  const char* text =
      "input x:8\n"
      "input a:8\n"
      "mem 256\n"
      "store a x\n"
      "v := load #x05\n"
      "sink out v\n";
  ToyProgram p = parse_toy(text);
  auto basic = taint_propagate(p, {{"x", 1}, {"a", 9}}, {});
  CHECK(!basic[0].tainted);  // concrete replay wrote elsewhere
  TaintOptions over;
  over.address_overapprox = true;
  auto approx = taint_propagate(p, {{"x", 1}, {"a", 9}}, over);
  CHECK(approx[0].tainted);  // tainted address smears the whole memory
}

TEST_CASE("taint soundness across the fixture corpus") {
  auto solver = make_solver({});
  for (const auto& fixture : builtin_fixtures()) {
    if (fixture.name.find("64bit") != std::string::npos) continue;
    CAPTURE(fixture.name);
    ToyProgram p = parse_toy(fixture.ir_text);
    auto sinks = symbolic_single_path(p, fixture.triggering_input);
    for (int mask = 0; mask < 8; ++mask) {
      TaintOptions opts;
      opts.control_flow = mask & 1;
      opts.address_overapprox = mask & 2;
      opts.suppression = mask & 4;
      auto tags = taint_propagate(p, fixture.triggering_input, opts);
      REQUIRE(tags.size() == sinks.size());
      for (std::size_t i = 0; i < tags.size(); ++i) {
        if (!tags[i].tainted) {
          // untainted must imply no weak control
          CHECK(check_wc(sinks[i].state, sinks[i].target, *solver).verdict ==
                Tri::False);
        }
      }
    }
  }
}

}  // TEST_SUITE
