#pragma once

#include <cstdint>
#include <vector>

#include "ctrl/interval_domain.hpp"
#include "ctrl/solver.hpp"

namespace ctrl {

struct DensityInterval {
  Word lo = 0;
  Word hi = 0;
  unsigned samples = 0;
  unsigned hits = 0;
  double density = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool had_unknown = false;
};

struct NewsomeConfig {
  unsigned samples_per_interval = 30;
  double confidence = 0.95;
  unsigned max_intervals = 100;
  std::uint64_t rng_seed = 0;
};

// Sampling-based feasible-set estimator: shrink an interval to its feasible
// bounds, probe uniform candidates with pinned-value sat queries, attach a
// Wilson confidence interval to the hit density, and split at a random
// feasible sample while the density stays below one and budget remains.
// Deterministic for a given seed.
std::vector<DensityInterval> newsome_domain(const SymState& state,
                                            const TargetSpec& target,
                                            Solver& solver,
                                            const NewsomeConfig& config);

// Upper/lower Wilson score bounds for a binomial proportion.
std::pair<double, double> wilson_interval(unsigned hits, unsigned samples,
                                          double confidence);

// Inverse standard normal CDF (rational approximation, ~1e-9 absolute).
double probit(double p);

// Weak-interval rendering of the estimate, for comparison with the interval
// domains produced by the refinement algorithms.
ControlDomain newsome_to_domain(unsigned width,
                                const std::vector<DensityInterval>& intervals);

}  // namespace ctrl
