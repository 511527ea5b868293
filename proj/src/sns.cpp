#include "ctrl/sns.hpp"

#include <algorithm>

namespace ctrl {

WcResult check_wc(const SymState& state, const TargetSpec& target,
                  Solver& solver) {
  auto [copy, copy_target] = duplicate(state, target);
  SymState combined = state;
  for (const auto& in : copy.inputs) combined.inputs.push_back(in);
  for (const auto& c : copy.constraints) combined.constraints.push_back(c);
  for (const auto& d : copy.array_decls) combined.array_decls.push_back(d);
  for (const auto& a : copy.array_asserts) combined.array_asserts.push_back(a);
  combined.constraints.push_back(mk_distinct(target.expr, copy_target.expr));

  Verdict v = solver.check_sat(combined);
  switch (v.status) {
    case Status::Sat: return {Tri::True, ""};
    case Status::Unsat: return {Tri::False, ""};
    default: return {Tri::Unknown, v.reason};
  }
}

ScCheck check_sc(const SymState& state, const TargetSpec& target,
                 const ValueSet& assumption, Solver& solver) {
  ScResult r = solver.sc_counterexample(state, target.expr, assumption);
  switch (r.kind) {
    case ScResult::Proved: return {Tri::True, std::nullopt, ""};
    case ScResult::Counterexample: return {Tri::False, r.witness, ""};
    default: return {Tri::Unknown, std::nullopt, r.reason};
  }
}

ShrinkOutcome shrink(const SymState& state, const TargetSpec& target,
                     Word lo, Word hi, Solver& solver) {
  const unsigned w = target.width;
  ShrinkOutcome out;
  SymState bounded = state;
  if (lo != 0)
    bounded = conjoin(bounded, mk_ule(mk_const(lo, w), target.expr));
  if (hi != mask_of(w))
    bounded = conjoin(bounded, mk_ule(target.expr, mk_const(hi, w)));

  OptResult min_r = solver.minimize(bounded, target.expr);
  if (min_r.status == Status::Unknown && min_r.reason == "unsat") {
    out.kind = ShrinkOutcome::Empty;
    return out;
  }
  OptResult max_r = solver.maximize(bounded, target.expr);

  const bool min_ok = min_r.status == Status::Sat;
  const bool max_ok = max_r.status == Status::Sat;
  out.lo = min_ok ? min_r.value : (min_r.best_bound ? *min_r.best_bound : lo);
  out.hi = max_ok ? max_r.value : (max_r.best_bound ? *max_r.best_bound : hi);

  SymState tightened = bounded;
  if (out.lo != lo)
    tightened = conjoin(tightened, mk_ule(mk_const(out.lo, w), target.expr));
  if (out.hi != hi)
    tightened = conjoin(tightened, mk_ule(target.expr, mk_const(out.hi, w)));
  out.restricted = std::move(tightened);
  if (min_ok && max_ok) {
    out.kind = ShrinkOutcome::Ok;
  } else {
    out.kind = ShrinkOutcome::Unknown;
    out.reason = min_ok ? max_r.reason : min_r.reason;
  }
  return out;
}

namespace {

struct SnsRun {
  const TargetSpec& target;
  Solver& solver;
  const SnsConfig& config;
  std::optional<FixedBits> pattern;
  ControlDomain result;

  void recurse(const SymState& state, Word lo, Word hi) {
    ShrinkOutcome sh = shrink(state, target, lo, hi, solver);
    if (sh.kind == ShrinkOutcome::Empty) return;
    if (sh.kind == ShrinkOutcome::Unknown) {
      emit(sh.lo, sh.hi, Guarantee::Weak);
      return;
    }

    ValueSet set = ValueSet::single_interval(target.width, sh.lo, sh.hi);
    set.fixed = pattern;
    if (set.empty_set()) return;

    ScResult sc = solver.sc_counterexample(sh.restricted, target.expr, set);
    if (sc.kind == ScResult::Proved) {
      emit(sh.lo, sh.hi, Guarantee::Strong);
      return;
    }
    if (sc.kind == ScResult::Unknown) {
      emit(sh.lo, sh.hi, Guarantee::Weak);
      return;
    }
    if (result.splits_used >= config.split_limit) {
      result.budget_exhausted = true;
      emit(sh.lo, sh.hi, Guarantee::Weak);
      return;
    }
    ++result.splits_used;
    const Word y = sc.witness;
    // Counterexamples are strictly inside: the shrunk bounds are feasible.
    if (y > sh.lo) recurse(sh.restricted, sh.lo, y - 1);
    if (y < sh.hi) recurse(sh.restricted, y + 1, sh.hi);
  }

  void emit(Word lo, Word hi, Guarantee g) {
    result.intervals.push_back({lo, hi, g});
  }
};

ControlDomain run_sns(const SymState& state, const TargetSpec& target,
                      Solver& solver, const SnsConfig& config,
                      std::optional<FixedBits> pattern) {
  SnsRun run{target, solver, config, pattern, {}};
  run.result.width = target.width;

  // Assumption-provided value sets seed the worklist and may add their own
  // pattern on top of the fixed-bits one.
  std::vector<std::pair<Word, Word>> seeds;
  if (target.assumption) {
    if (target.assumption->fixed) {
      const FixedBits add = *target.assumption->fixed;
      if (!pattern) {
        run.pattern = add;
      } else {
        // Conflicting fixed values on a shared mask bit empty the set.
        const Word shared = pattern->mask & add.mask;
        if ((pattern->bits & shared) != (add.bits & shared)) {
          run.result.exact = true;
          return run.result;
        }
        run.pattern = FixedBits{pattern->mask | add.mask,
                                pattern->bits | add.bits};
      }
    }
    for (const auto& iv : target.assumption->intervals) seeds.push_back(iv);
  } else {
    seeds.emplace_back(0, mask_of(target.width));
  }

  for (const auto& [lo, hi] : seeds) run.recurse(state, lo, hi);

  run.result.normalize();
  if (run.pattern && run.pattern->mask != 0)
    run.result.fixed_bits = run.pattern;
  run.result.exact =
      run.result.all_strong() && !run.result.budget_exhausted;
  return run.result;
}

}  // namespace

ControlDomain shrink_and_split(const SymState& state, const TargetSpec& target,
                               Solver& solver, const SnsConfig& config) {
  return run_sns(state, target, solver, config, std::nullopt);
}

std::optional<FixedBits> fixed_bits(const SymState& state,
                                    const TargetSpec& target, Solver& solver) {
  return solver.solve_fixed_bits(state, target.expr, target.width);
}

ControlDomain sns_fixed_bits(const SymState& state, const TargetSpec& target,
                             Solver& solver, const SnsConfig& config) {
  auto fb = solver.solve_fixed_bits(state, target.expr, target.width);
  std::optional<FixedBits> pattern;
  if (fb && fb->mask != 0) pattern = *fb;
  return run_sns(state, target, solver, config, pattern);
}

ControlDomain brute_force_domain(const SymState& state,
                                 const TargetSpec& target, Solver& solver) {
  std::vector<Word> values = solver.enumerate_feasible(state, target.expr);
  if (target.assumption) {
    std::vector<Word> kept;
    for (Word v : values)
      if (target.assumption->contains(v)) kept.push_back(v);
    values = std::move(kept);
  }
  return ControlDomain::from_values(target.width, values);
}

}  // namespace ctrl
