#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctrl/interval_domain.hpp"

namespace ctrl {

// A weight over domain values together with the antiderivative used by the
// interval-integral estimators. The mass assigned to integer n is
// antiderivative(n+1) - antiderivative(n); values below support_lo carry no
// mass (and are excluded from both sides of every ratio).
//
// For the built-ins the documented gap between the point weight omega(n) and
// the mass of n is bounded by |omega(n) - omega(n+1)| (monotone weights).
struct WeightFn {
  std::string name;
  long double support_lo = 0;
  std::function<long double(long double)> omega;
  std::function<long double(long double)> antiderivative;

  long double mass(long double n) const;
  // Sum of masses of integers in [lo, hi] (telescoped, exact).
  long double range_mass(long double lo, long double hi) const;
  // Total mass of a width-w domain.
  long double total_mass(unsigned width) const;
};

WeightFn weight_log();            // 1 / (ln2 * x)
WeightFn weight_inverse_square(); // 1 / x^2
WeightFn weight_inverse_sqrt();   // 1 / sqrt(x)
WeightFn weight_uniform();        // 1
WeightFn weight_cfh_valid();      // 1 on [0, 2^48), 0 above
// Base weight applied to the distance |x - bound|.
WeightFn weight_distance(const WeightFn& base, Word bound);

const std::vector<WeightFn>& builtin_weights();
// Resolves a name: builtins, or "dist:<base>:<bound>".
std::optional<WeightFn> find_weight(const std::string& name);
// Piecewise weight from a declarative JSON file: segments of [from, to]
// integer ranges, each backed by a named base weight.
WeightFn load_weight_file(const std::string& path);

// ln|represented set| / ln|domain|; empty domains score 0.
double qc(const ControlDomain& d);
// log2 of the represented count (the ratio scaled by the width).
double qc_bits(const ControlDomain& d);

// Mass of the represented set over the mass of the full domain, summed
// value-by-value (pattern-aware). Requires an enumerable pattern set.
double wqc_exact(const ControlDomain& d, const WeightFn& w);

// Interval-integral estimator: per interval [i, j], the mass is
// antiderivative(j+1) - antiderivative(i), ignoring any pattern.
double wqc_interval(const ControlDomain& d, const WeightFn& w);

// Per-interval feasible counts for the density-corrected estimator.
struct DensityInfo {
  std::vector<BigCount> rho;  // aligned with domain intervals
};

DensityInfo density_from_fixed_bits(const ControlDomain& d);

// Density-corrected estimator: each interval's integral is scaled by
// rho(I) / (j - i); reduces to the plain interval form at full density.
double wqc_constrained(const ControlDomain& d, const WeightFn& w,
                       const DensityInfo& density);

// Interval estimator with the density correction applied automatically when
// the domain carries fixed bits.
double wqc_auto(const ControlDomain& d, const WeightFn& w);

BigCount count_fixed_bits(Word lo, Word hi, Word mask, Word bits,
                          unsigned width);

// Out-of-bounds recipe: (wqc(offset) + wqc(size)) * width; an absent
// component is a fixed parameter and contributes 0.
double score_oob(const std::optional<ControlDomain>& offset_domain,
                 const std::optional<ControlDomain>& size_domain,
                 unsigned width, const WeightFn& w);

// Control-flow hijack recipe: valid-address mass ratio for 64-bit pointers
// (zero weight at and above 2^48).
double score_cfh(const ControlDomain& pointer_domain);

// Data recipe: mean quantitative control over up to eight byte domains.
double score_data(const std::vector<ControlDomain>& byte_domains);

struct BandCutoffs {
  double medium_at;
  double high_at;
};

BandCutoffs default_cutoffs(const std::string& recipe);
std::string band_label(double score, const BandCutoffs& cutoffs);

}  // namespace ctrl
