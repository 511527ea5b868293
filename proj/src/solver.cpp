#include "ctrl/solver.hpp"

namespace ctrl {

std::unique_ptr<Solver> make_internal_solver(const SolverConfig& config);
std::unique_ptr<Solver> make_external_solver(const SolverConfig& config);

std::unique_ptr<Solver> make_solver(const SolverConfig& config) {
  switch (config.backend) {
    case Backend::Internal:
      return make_internal_solver(config);
    case Backend::External:
      return make_external_solver(config);
  }
  throw Error("unknown solver backend");
}

OptResult binary_search_opt(Solver& solver, const SymState& state,
                            const ExprPtr& target, bool want_max) {
  const unsigned w = target->width;
  Verdict first = solver.check_sat(state);
  if (first.status == Status::Unsat)
    return {Status::Unknown, 0, std::nullopt, "unsat"};
  if (first.status == Status::Unknown)
    return {Status::Unknown, 0, std::nullopt, first.reason};

  Word cur = eval(target, first.model);
  if (!want_max) {
    Word lo = 0, hi = cur;
    while (lo < hi) {
      const Word mid = lo + (hi - lo) / 2;
      Verdict v = solver.check_sat(
          conjoin(state, mk_ule(target, mk_const(mid, w))));
      if (v.status == Status::Sat) {
        hi = eval(target, v.model);
      } else if (v.status == Status::Unsat) {
        lo = mid + 1;
      } else {
        return {Status::Unknown, 0, hi, v.reason};
      }
    }
    return {Status::Sat, lo, std::nullopt, ""};
  }
  Word lo = cur, hi = mask_of(w);
  while (lo < hi) {
    const Word mid = lo + (hi - lo + 1) / 2;
    Verdict v =
        solver.check_sat(conjoin(state, mk_ule(mk_const(mid, w), target)));
    if (v.status == Status::Sat) {
      lo = eval(target, v.model);
    } else if (v.status == Status::Unsat) {
      hi = mid - 1;
    } else {
      return {Status::Unknown, 0, lo, v.reason};
    }
  }
  return {Status::Sat, lo, std::nullopt, ""};
}

}  // namespace ctrl
