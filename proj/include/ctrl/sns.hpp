#pragma once

#include <optional>

#include "ctrl/interval_domain.hpp"
#include "ctrl/solver.hpp"

namespace ctrl {

enum class Tri { True, False, Unknown };

struct SnsConfig {
  unsigned split_limit = 100;
  bool use_fixed_bits = false;
  SolverConfig solver;
};

struct WcResult {
  Tri verdict = Tri::Unknown;
  std::string reason;
};

struct ScCheck {
  Tri verdict = Tri::Unknown;
  std::optional<Word> counterexample;
  std::string reason;
};

// Weak control: duplicates the state, conjoins target != target', returns
// satisfiability. True iff the feasible set has at least two values.
WcResult check_wc(const SymState& state, const TargetSpec& target,
                  Solver& solver);

// Strong control over the assumption set: true iff every member is
// feasible; false carries an infeasible witness.
ScCheck check_sc(const SymState& state, const TargetSpec& target,
                 const ValueSet& assumption, Solver& solver);

struct ShrinkOutcome {
  enum Kind { Ok, Empty, Unknown } kind = Unknown;
  Word lo = 0;
  Word hi = 0;
  SymState restricted;  // carries the conjoined range bounds
  std::string reason;
};

// Tightens [interval.lo, interval.hi] to the feasible bounds of the target.
// Empty when no feasible value lies inside; Unknown keeps the best-known
// bounds.
ShrinkOutcome shrink(const SymState& state, const TargetSpec& target,
                     Word lo, Word hi, Solver& solver);

// Recursive domain extraction: shrink, prove strong control over the shrunk
// interval (restricted to `pattern` when given), emit Strong on success,
// split around the counterexample otherwise. Unknowns degrade intervals to
// Weak; hitting the split limit emits the remainder Weak and sets
// budget_exhausted.
ControlDomain shrink_and_split(const SymState& state, const TargetSpec& target,
                               Solver& solver, const SnsConfig& config);

// The two-duplicate fixed-bits computation; (0,0) means no bits are fixed or
// the agreement query failed, nullopt only on unknowns.
std::optional<FixedBits> fixed_bits(const SymState& state,
                                    const TargetSpec& target, Solver& solver);

// shrink_and_split with the fixed-bits pattern folded into the strong
// control checks; the result carries the pattern.
ControlDomain sns_fixed_bits(const SymState& state, const TargetSpec& target,
                             Solver& solver, const SnsConfig& config);

// Exact domain from the internal enumerator.
ControlDomain brute_force_domain(const SymState& state,
                                 const TargetSpec& target, Solver& solver);

}  // namespace ctrl
