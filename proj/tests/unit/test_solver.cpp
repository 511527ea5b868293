#include <doctest.h>

#include <fstream>
#include <sstream>

#include "ctrl/smt2.hpp"
#include "ctrl/solver.hpp"
#include "helpers.hpp"

using namespace ctrl;
using testutil::brute_enum;

namespace {

std::string fixture_path(const char* name) {
  return std::string(CTRL_TEST_DIR) + "/fixtures/" + name;
}

ParsedFile load_fixture_file(const char* name) {
  std::ifstream in(fixture_path(name));
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_smt2(os.str());
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("check_sat basics") {
  auto solver = make_solver({});
  SymState s = testutil::one_var_state("x", 8);
  ExprPtr x = mk_var("x", 8);

  Verdict v = solver->check_sat(s);
  REQUIRE(v.status == Status::Sat);
  CHECK(v.model.count("x") == 1);

  SymState contradictory = conjoin(
      conjoin(s, mk_ult(x, mk_const(5, 8))), mk_ult(mk_const(9, 8), x));
  CHECK(solver->check_sat(contradictory).status == Status::Unsat);
}

TEST_CASE("models satisfy every constraint") {
  testutil::TestRng rng(11);
  auto solver = make_solver({});
  for (int round = 0; round < 50; ++round) {
    auto sys = testutil::random_system(rng);
    Verdict v = solver->check_sat(sys.state);
    REQUIRE(v.status != Status::Unknown);
    if (v.status == Status::Sat) {
      for (const auto& c : sys.state.constraints) CHECK(eval(c, v.model) == 1);
      for (const auto& in : sys.state.inputs) CHECK(v.model.count(in.name));
    } else {
      CHECK(brute_enum(sys.state, sys.target.expr).empty());
    }
  }
}

TEST_CASE("motex fixture file: sat model lands in the feasible set") {
  auto parsed = load_fixture_file("motex2_8bit.smt2");
  REQUIRE(parsed.target.has_value());
  auto solver = make_solver({});
  Verdict v = solver->check_sat(parsed.state);
  REQUIRE(v.status == Status::Sat);
  const Word value = eval(parsed.target->expr, v.model);
  CHECK(value >= 17);
  CHECK(value <= 41);
}

TEST_CASE("enumerate_feasible ground truth") {
  auto solver = make_solver({});
  SymState s = testutil::one_var_state("x", 8);
  ExprPtr x = mk_var("x", 8);

  auto all = solver->enumerate_feasible(s, x);
  CHECK(all.size() == 256);
  CHECK(all.front() == 0);
  CHECK(all.back() == 255);

  auto doubled = solver->enumerate_feasible(
      s, mk_bin(Op::Mul, x, mk_const(2, 8)));
  CHECK(doubled.size() == 128);
  for (std::size_t i = 0; i < doubled.size(); ++i) CHECK(doubled[i] == 2 * i);

  auto parsed = load_fixture_file("motex2_8bit.smt2");
  auto motex = solver->enumerate_feasible(parsed.state, parsed.target->expr);
  std::vector<Word> expected;
  for (Word v = 17; v <= 41; ++v) expected.push_back(v);
  CHECK(motex == expected);
}

TEST_CASE("enumerate_feasible budget") {
  SolverConfig cfg;
  cfg.enum_budget_bits = 8;
  auto solver = make_solver(cfg);
  SymState s;
  s.inputs.push_back({"a", 8});
  s.inputs.push_back({"b", 8});
  CHECK_THROWS_AS(solver->enumerate_feasible(s, mk_var("a", 8)), BudgetError);
}

TEST_CASE("enumeration agrees with the tree-walking oracle") {
  testutil::TestRng rng(21);
  auto solver = make_solver({});
  for (int round = 0; round < 60; ++round) {
    auto sys = testutil::random_system(rng);
    CHECK(solver->enumerate_feasible(sys.state, sys.target.expr) ==
          brute_enum(sys.state, sys.target.expr));
  }
}

TEST_CASE("minimize and maximize") {
  auto solver = make_solver({});
  SymState s = testutil::one_var_state("x", 8);
  ExprPtr x = mk_var("x", 8);
  SymState bounded = conjoin(
      conjoin(s, mk_ule(mk_const(17, 8), x)), mk_ule(x, mk_const(41, 8)));

  OptResult mn = solver->minimize(bounded, x);
  OptResult mx = solver->maximize(bounded, x);
  REQUIRE(mn.status == Status::Sat);
  REQUIRE(mx.status == Status::Sat);
  CHECK(mn.value == 17);
  CHECK(mx.value == 41);

  SymState even_high = conjoin(
      conjoin(s, mk_eq(mk_bin(Op::And, x, mk_const(1, 8)), mk_const(0, 8))),
      mk_ule(mk_const(3, 8), x));
  CHECK(solver->minimize(even_high, x).value == 4);

  SymState unsat_state = conjoin(s, mk_bool(false));
  OptResult r = solver->minimize(unsat_state, x);
  CHECK(r.status == Status::Unknown);
  CHECK(r.reason == "unsat");
}

TEST_CASE("binary-search optimization agrees with enumeration") {
  testutil::TestRng rng(31);
  SolverConfig cfg;
  cfg.opt_mode = OptMode::BinarySearch;
  for (int round = 0; round < 40; ++round) {
    auto sys = testutil::random_system(rng);
    auto bin_solver = make_solver(cfg);
    auto values = brute_enum(sys.state, sys.target.expr);
    OptResult mn = bin_solver->minimize(sys.state, sys.target.expr);
    OptResult mx = bin_solver->maximize(sys.state, sys.target.expr);
    if (values.empty()) {
      CHECK(mn.status == Status::Unknown);
      CHECK(mx.status == Status::Unknown);
    } else {
      REQUIRE(mn.status == Status::Sat);
      REQUIRE(mx.status == Status::Sat);
      CHECK(mn.value == values.front());
      CHECK(mx.value == values.back());
    }
  }
}

TEST_CASE("binary search stays inside the query bound") {
  SolverConfig cfg;
  cfg.opt_mode = OptMode::BinarySearch;
  auto solver = make_solver(cfg);
  SymState s = testutil::one_var_state("x", 8);
  ExprPtr x = mk_var("x", 8);
  SymState bounded = conjoin(s, mk_ule(mk_const(100, 8), x));

  solver->minimize(bounded, x);
  // at most ceil(log2 |Dom|) + 1 sat queries per optimization call
  CHECK(solver->stats().sat_queries <= 9);
}

TEST_CASE("sc_counterexample") {
  auto solver = make_solver({});
  SymState s = testutil::one_var_state("x", 8);
  ExprPtr x = mk_var("x", 8);

  // full control over the full domain
  ScResult full = solver->sc_counterexample(s, x, ValueSet::full(8));
  CHECK(full.kind == ScResult::Proved);

  // a single hole yields that hole as the witness
  SymState holed = conjoin(s, mk_distinct(x, mk_const(100, 8)));
  ScResult hole = solver->sc_counterexample(holed, x, ValueSet::full(8));
  REQUIRE(hole.kind == ScResult::Counterexample);
  CHECK(hole.witness == 100);
  // the witness really is infeasible
  CHECK(solver
            ->check_sat(conjoin(holed, mk_eq(x, mk_const(hole.witness, 8))))
            .status == Status::Unsat);

  // even values, when asked only about the even pattern
  SymState evens = conjoin(
      s, mk_eq(mk_bin(Op::And, x, mk_const(1, 8)), mk_const(0, 8)));
  ValueSet even_set = ValueSet::single_interval(8, 0, 254);
  even_set.fixed = FixedBits{1, 0};
  CHECK(solver->sc_counterexample(evens, x, even_set).kind ==
        ScResult::Proved);

  CHECK_THROWS_AS(
      solver->sc_counterexample(
          s, x,
          [] {
            ValueSet empty;
            empty.width = 8;
            return empty;
          }()),
      Error);
}

TEST_CASE("sc_counterexample agrees with enumeration on random systems") {
  testutil::TestRng rng(41);
  auto solver = make_solver({});
  for (int round = 0; round < 60; ++round) {
    auto sys = testutil::random_system(rng);
    auto values = brute_enum(sys.state, sys.target.expr);
    const unsigned w = sys.target.width;
    Word a = rng.next() & mask_of(w);
    Word b = rng.next() & mask_of(w);
    if (a > b) std::swap(a, b);
    ValueSet set = ValueSet::single_interval(w, a, b);

    ScResult r = solver->sc_counterexample(sys.state, sys.target.expr, set);
    bool all_feasible = true;
    Word first_missing = 0;
    for (Word v = a;; ++v) {
      if (!std::binary_search(values.begin(), values.end(), v)) {
        all_feasible = false;
        first_missing = v;
        break;
      }
      if (v == b) break;
    }
    if (all_feasible) {
      CHECK(r.kind == ScResult::Proved);
    } else {
      REQUIRE(r.kind == ScResult::Counterexample);
      CHECK(r.witness == first_missing);
    }
  }
}

TEST_CASE("fixed bits extraction") {
  auto solver = make_solver({});
  SymState s = testutil::one_var_state("x", 8);
  ExprPtr x = mk_var("x", 8);

  // unconstrained: no fixed bits
  auto none = solver->solve_fixed_bits(s, x, 8);
  REQUIRE(none.has_value());
  CHECK(none->mask == 0);

  // even values fix bit zero
  SymState evens = conjoin(
      s, mk_eq(mk_bin(Op::And, x, mk_const(1, 8)), mk_const(0, 8)));
  auto even_fb = solver->solve_fixed_bits(evens, x, 8);
  REQUIRE(even_fb.has_value());
  CHECK((even_fb->mask & 1) == 1);
  CHECK((even_fb->bits & 1) == 0);
  CHECK(even_fb->mask == 1);  // the remaining bits vary

  // a constant fixes everything
  SymState pinned = conjoin(s, mk_eq(x, mk_const(0xa5, 8)));
  auto all_fb = solver->solve_fixed_bits(pinned, x, 8);
  REQUIRE(all_fb.has_value());
  CHECK(all_fb->mask == 0xff);
  CHECK(all_fb->bits == 0xa5);
}

TEST_CASE("fixed bits degrade on the shared-agreement corner case") {
  // feasible set {0000, 0011, 0101, 0110}: bit 3 is truly fixed but every
  // pair of values agrees on at least one additional bit, so the
  // two-duplicate query is unsatisfiable and the result degrades.
  auto solver = make_solver({});
  SymState s = testutil::one_var_state("x", 4);
  ExprPtr x = mk_var("x", 4);
  ExprPtr in0 = mk_eq(x, mk_const(0, 4));
  ExprPtr in3 = mk_eq(x, mk_const(3, 4));
  ExprPtr in5 = mk_eq(x, mk_const(5, 4));
  ExprPtr in6 = mk_eq(x, mk_const(6, 4));
  SymState parity =
      conjoin(s, mk_or(mk_or(in0, in3), mk_or(in5, in6)));
  auto fb = solver->solve_fixed_bits(parity, x, 4);
  CHECK(!fb.has_value());
}

TEST_CASE("weak-control style query across the duplication budget") {
  // 16 input bits duplicate to 32; the component decomposition must still
  // decide the disequality exactly.
  auto parsed = load_fixture_file("motex2_8bit.smt2");
  auto solver = make_solver({});
  auto [copy, copy_target] = duplicate(parsed.state, *parsed.target);
  SymState combined = parsed.state;
  for (const auto& in : copy.inputs) combined.inputs.push_back(in);
  for (const auto& c : copy.constraints) combined.constraints.push_back(c);
  combined.constraints.push_back(
      mk_distinct(parsed.target->expr, copy_target.expr));
  Verdict v = solver->check_sat(combined);
  REQUIRE(v.status == Status::Sat);
  CHECK(eval(parsed.target->expr, v.model) !=
        eval(copy_target.expr, v.model));
}

TEST_CASE("arrays are unknown for the internal backend, never unsat") {
  auto solver = make_solver({});
  SymState s = testutil::one_var_state("x", 8);
  s.array_decls.emplace_back("m", "(Array (_ BitVec 8) (_ BitVec 8))");
  s.array_asserts.push_back("(= (select m x) #x01)");
  Verdict v = solver->check_sat(s);
  CHECK(v.status == Status::Unknown);
  CHECK(solver->stats().unknowns >= 1);
  CHECK_THROWS_AS(solver->enumerate_feasible(s, mk_var("x", 8)),
                  UnsupportedError);
}

TEST_CASE("eval_model examples") {
  ExprPtr x = mk_var("x", 8);
  CHECK(eval_model({{"x", 3}}, mk_bin(Op::Add, x, x)) == 6);
  CHECK(eval_model({{"x", 255}}, mk_bin(Op::Add, x, mk_const(1, 8))) == 0);
  CHECK(eval_model({{"x", 7}}, mk_bin(Op::UDiv, x, mk_const(0, 8))) == 255);
  CHECK_THROWS_AS(eval_model({}, x), EvalError);
}

}  // TEST_SUITE
