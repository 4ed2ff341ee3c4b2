#pragma once

#include <cstdint>
#include <vector>

namespace cbopt {

// Log-log regression of the expected-step error against tau on the grid
// {0.04, 0.01, 0.0025} for f(x) = 0.5 * ||x||^2 in d = 5. The theory puts the
// leading error at O(tau^{3/2}); the fitted slope should land in [1.25, 1.75].
struct SlopeCheck {
  std::vector<double> taus;
  std::vector<double> errors;
  double slope = 0.0;
};

// NES side, eta = 1, sigma^2 = tau, centered at mu = 0 where the quadratic's
// smoothed gradient vanishes and the estimator IS the remainder term. The
// same draws are reused across the tau grid so the remainder scales exactly.
SlopeCheck nes_slope_check(long long m, uint64_t seed);

// CH side, alpha = 100, sigma_tilde^2 = tau / alpha, centered at a unit-norm
// point, antithetic sampling: the measured error mixes the tau^2 smoothing
// bias with the Monte-Carlo tail.
SlopeCheck ch_slope_check(long long m, uint64_t seed);

// Cosine similarity of the two descent-convention expected steps on a random
// positive-definite quadratic in d = 5 at matched scalings (tau = 0.01,
// sigma^2 = tau / eta, sigma_tilde^2 = tau / alpha), sharing one sample set.
double ch_nes_cosine(long long m, uint64_t seed);

// Least-squares slope of log(errors) against log(taus).
double loglog_slope(const std::vector<double>& taus, const std::vector<double>& errors);

}  // namespace cbopt
