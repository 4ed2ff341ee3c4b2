#include "cbopt/expansion_checks.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "cbopt/estimators.hpp"
#include "cbopt/rng.hpp"

namespace cbopt {

namespace {

constexpr int kDim = 5;
const std::vector<double> kTauGrid = {0.04, 0.01, 0.0025};

double half_sq_norm(const Eigen::VectorXd& x) { return 0.5 * x.squaredNorm(); }

}  // namespace

double loglog_slope(const std::vector<double>& taus, const std::vector<double>& errors) {
  if (taus.size() != errors.size() || taus.size() < 2) {
    throw std::invalid_argument("loglog_slope: need matching lists of >= 2 points");
  }
  const auto n = static_cast<double>(taus.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double x = std::log(taus[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SlopeCheck nes_slope_check(long long m, uint64_t seed) {
  SlopeCheck out;
  out.taus = kTauGrid;
  const Eigen::VectorXd mu = Eigen::VectorXd::Zero(kDim);
  for (const double tau : kTauGrid) {
    Rng rng(seed);  // identical draws for every tau: the remainder scales purely
    const double sigma = std::sqrt(tau);
    const Eigen::VectorXd step = nes_expected_step(half_sq_norm, mu, sigma, 1.0, m, rng, false);
    out.errors.push_back((step - tau * mu).norm());
  }
  out.slope = loglog_slope(out.taus, out.errors);
  return out;
}

SlopeCheck ch_slope_check(long long m, uint64_t seed) {
  SlopeCheck out;
  out.taus = kTauGrid;
  const double alpha = 100.0;
  const Eigen::VectorXd c = Eigen::VectorXd::Ones(kDim) / std::sqrt(static_cast<double>(kDim));
  for (const double tau : kTauGrid) {
    Rng rng(seed);
    const double sigma_tilde = std::sqrt(tau / alpha);
    const Eigen::VectorXd step = ch_expected_step(half_sq_norm, c, sigma_tilde, alpha, m, rng, true);
    out.errors.push_back((step + tau * c).norm());  // grad f(c) = c
  }
  out.slope = loglog_slope(out.taus, out.errors);
  return out;
}

double ch_nes_cosine(long long m, uint64_t seed) {
  const double tau = 0.01, eta = 1.0, alpha = 100.0;
  const double sigma = std::sqrt(tau / eta);
  const double sigma_tilde = std::sqrt(tau / alpha);

  Rng rng(seed);
  Eigen::MatrixXd b(kDim, kDim);
  for (int i = 0; i < kDim; ++i) {
    for (int j = 0; j < kDim; ++j) b(i, j) = rng.normal();
  }
  const Eigen::MatrixXd a = b.transpose() * b + Eigen::MatrixXd::Identity(kDim, kDim);
  Eigen::VectorXd x0(kDim);
  for (int i = 0; i < kDim; ++i) x0[i] = rng.normal() + 1.0;
  const auto f = [&a](const Eigen::VectorXd& x) { return 0.5 * x.dot(a * x); };

  Eigen::MatrixXd samples(m, kDim);
  for (long long i = 0; i < m; ++i) {
    for (int j = 0; j < kDim; ++j) samples(i, j) = rng.normal();
  }

  const Eigen::VectorXd nes_descent = -nes_expected_step_at(f, x0, sigma, eta, samples);
  const Eigen::VectorXd ch_descent = ch_expected_step_at(f, x0, sigma_tilde, alpha, samples);
  return nes_descent.dot(ch_descent) / (nes_descent.norm() * ch_descent.norm());
}

}  // namespace cbopt
