#include "ctrl/newsome.hpp"

#include <algorithm>
#include <cmath>

namespace ctrl {

namespace {

// splitmix64; used to derive per-branch streams deterministically.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

struct Rng {
  std::uint64_t state;
  std::uint64_t next() { return state = mix(state); }
  // Uniform in [lo, hi]; modulo bias is irrelevant at sampling scale.
  Word uniform(Word lo, Word hi) {
    const Word span = hi - lo;
    if (span == ~Word{0}) return next();
    return lo + next() % (span + 1);
  }
};

}  // namespace

double probit(double p) {
  // Acklam's rational approximation to the inverse normal CDF.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  if (p <= 0.0 || p >= 1.0) throw Error("probit argument must be in (0,1)");
  const double plow = 0.02425;
  if (p < plow) {
    const double q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p > 1 - plow) {
    const double q = std::sqrt(-2 * std::log(1 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

std::pair<double, double> wilson_interval(unsigned hits, unsigned samples,
                                          double confidence) {
  if (samples == 0) return {0.0, 1.0};
  const double z = probit(1.0 - (1.0 - confidence) / 2.0);
  const double n = samples;
  const double p = static_cast<double>(hits) / n;
  const double z2 = z * z;
  const double center = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half =
      z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  // The bounds are exactly 1 (resp. 0) at the degenerate proportions;
  // rounding must not exclude them.
  const double lo = hits == 0 ? 0.0 : std::max(0.0, center - half);
  const double hi = hits == samples ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

namespace {

struct Estimator {
  const SymState& state;
  const TargetSpec& target;
  Solver& solver;
  const NewsomeConfig& config;
  std::vector<DensityInterval> out;
  unsigned interval_count = 1;  // live + emitted

  bool feasible(Word value, bool& unknown_flag) {
    SymState pinned = conjoin(
        state, mk_eq(target.expr, mk_const(value, target.width)));
    Verdict v = solver.check_sat(pinned);
    if (v.status == Status::Unknown) {
      unknown_flag = true;
      return false;  // unknown probes count as misses, flagged
    }
    return v.status == Status::Sat;
  }

  void estimate(Word lo, Word hi, std::uint64_t seed) {
    ShrinkBounds sb = shrink_bounds(lo, hi);
    if (!sb.nonempty) return;
    lo = sb.lo;
    hi = sb.hi;

    Rng rng{mix(seed ^ mix(lo) ^ mix(hi ^ 0x5bf03635ull))};
    DensityInterval di;
    di.lo = lo;
    di.hi = hi;
    di.had_unknown = sb.unknown;
    std::vector<Word> feasible_samples;
    for (unsigned s = 0; s < config.samples_per_interval; ++s) {
      const Word candidate = rng.uniform(lo, hi);
      ++di.samples;
      bool unk = false;
      if (feasible(candidate, unk)) {
        ++di.hits;
        feasible_samples.push_back(candidate);
      }
      di.had_unknown = di.had_unknown || unk;
    }
    di.density = di.samples ? static_cast<double>(di.hits) / di.samples : 0.0;
    auto [ci_lo, ci_hi] = wilson_interval(di.hits, di.samples, config.confidence);
    di.ci_lo = ci_lo;
    di.ci_hi = ci_hi;

    const Word length = hi - lo;
    const bool can_split = interval_count < config.max_intervals &&
                           length + 1 > config.samples_per_interval &&
                           lo != hi;
    const bool wants_split =
        di.density < 1.0 && (di.ci_hi - di.ci_lo) >= 0.1;
    if (can_split && wants_split) {
      Word split;
      if (!feasible_samples.empty()) {
        split = feasible_samples[rng.next() % feasible_samples.size()];
      } else {
        split = lo + length / 2;  // no feasible sample seen: midpoint
      }
      ++interval_count;
      if (split < hi) {
        estimate(lo, split, mix(seed ^ 0x243f6a88ull));
        estimate(split + 1, hi, mix(seed ^ 0x85a308d3ull));
      } else {
        estimate(lo, split - 1, mix(seed ^ 0x243f6a88ull));
        estimate(split, hi, mix(seed ^ 0x85a308d3ull));
      }
      return;
    }
    out.push_back(di);
  }

  struct ShrinkBounds {
    bool nonempty = false;
    bool unknown = false;
    Word lo = 0, hi = 0;
  };

  ShrinkBounds shrink_bounds(Word lo, Word hi) {
    const unsigned w = target.width;
    SymState bounded = state;
    if (lo != 0)
      bounded = conjoin(bounded, mk_ule(mk_const(lo, w), target.expr));
    if (hi != mask_of(w))
      bounded = conjoin(bounded, mk_ule(target.expr, mk_const(hi, w)));
    OptResult min_r = solver.minimize(bounded, target.expr);
    if (min_r.status == Status::Unknown && min_r.reason == "unsat") return {};
    OptResult max_r = solver.maximize(bounded, target.expr);
    ShrinkBounds sb;
    sb.nonempty = true;
    sb.unknown =
        min_r.status != Status::Sat || max_r.status != Status::Sat;
    sb.lo = min_r.status == Status::Sat ? min_r.value : lo;
    sb.hi = max_r.status == Status::Sat ? max_r.value : hi;
    return sb;
  }
};

}  // namespace

std::vector<DensityInterval> newsome_domain(const SymState& state,
                                            const TargetSpec& target,
                                            Solver& solver,
                                            const NewsomeConfig& config) {
  Estimator est{state, target, solver, config, {}, 1};
  est.estimate(0, mask_of(target.width), mix(config.rng_seed + 1));
  std::sort(est.out.begin(), est.out.end(),
            [](const DensityInterval& a, const DensityInterval& b) {
              return a.lo < b.lo;
            });
  return est.out;
}

ControlDomain newsome_to_domain(unsigned width,
                                const std::vector<DensityInterval>& intervals) {
  ControlDomain d;
  d.width = width;
  for (const auto& di : intervals)
    d.intervals.push_back({di.lo, di.hi, Guarantee::Weak});
  d.normalize();
  d.exact = false;
  return d;
}

}  // namespace ctrl
