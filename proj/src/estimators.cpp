#include "cbopt/estimators.hpp"

#include <cmath>
#include <stdexcept>

namespace cbopt {

Eigen::MatrixXd antithetic_samples(int n, int d, Rng& rng) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("antithetic_samples: n must be even and >= 2");
  Eigen::MatrixXd s(n, d);
  const int half = n / 2;
  for (int i = 0; i < half; ++i) {
    for (int j = 0; j < d; ++j) s(i, j) = rng.normal();
    s.row(half + i) = -s.row(i);
  }
  return s;
}

Eigen::VectorXd nes_gradient(const Eigen::VectorXd& f_values, const Eigen::MatrixXd& samples) {
  if (f_values.size() != samples.rows()) throw std::invalid_argument("nes_gradient: length mismatch");
  return samples.transpose() * f_values / static_cast<double>(samples.rows());
}

Eigen::VectorXd ch_gradient(const Eigen::VectorXd& f_values, const Eigen::MatrixXd& samples,
                            double alpha) {
  if (f_values.size() != samples.rows()) throw std::invalid_argument("ch_gradient: length mismatch");
  if (!(alpha > 0)) throw std::invalid_argument("ch_gradient: alpha must be positive");
  Eigen::ArrayXd s = -alpha * f_values.array();
  s -= s.maxCoeff();
  Eigen::ArrayXd w = s.exp();
  w /= w.sum();
  return samples.transpose() * w.matrix();
}

Eigen::VectorXd nes_expected_step_at(const ScalarFn& f, const Eigen::VectorXd& mu, double sigma,
                                     double eta, const Eigen::MatrixXd& samples) {
  Eigen::VectorXd values(samples.rows());
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    values[i] = f(mu + sigma * samples.row(i).transpose());
  }
  return eta * sigma * nes_gradient(values, samples);
}

Eigen::VectorXd ch_expected_step_at(const ScalarFn& f, const Eigen::VectorXd& c, double sigma_tilde,
                                    double alpha, const Eigen::MatrixXd& samples) {
  Eigen::VectorXd values(samples.rows());
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    values[i] = f(c + sigma_tilde * samples.row(i).transpose());
  }
  return sigma_tilde * ch_gradient(values, samples, alpha);
}

namespace {

Eigen::MatrixXd gaussian_samples(long long m, Eigen::Index d, Rng& rng, bool antithetic) {
  if (antithetic && m % 2 != 0) throw std::invalid_argument("antithetic sampling needs even m");
  Eigen::MatrixXd s(m, d);
  const long long head = antithetic ? m / 2 : m;
  for (long long i = 0; i < head; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) s(i, j) = rng.normal();
    if (antithetic) s.row(m / 2 + i) = -s.row(i);
  }
  return s;
}

}  // namespace

Eigen::VectorXd nes_expected_step(const ScalarFn& f, const Eigen::VectorXd& mu, double sigma,
                                  double eta, long long m, Rng& rng, bool antithetic) {
  return nes_expected_step_at(f, mu, sigma, eta, gaussian_samples(m, mu.size(), rng, antithetic));
}

Eigen::VectorXd ch_expected_step(const ScalarFn& f, const Eigen::VectorXd& c, double sigma_tilde,
                                 double alpha, long long m, Rng& rng, bool antithetic) {
  return ch_expected_step_at(f, c, sigma_tilde, alpha, gaussian_samples(m, c.size(), rng, antithetic));
}

RunRecord run_ch_nes(Objective& objective, const SearchDomain& domain, const ChNesConfig& config,
                     const EstimatorKind& kind, const RunLimits& limits) {
  if (config.n_samples < 2 || config.n_samples % 2 != 0) {
    throw std::invalid_argument("run_ch_nes: n_samples must be even and >= 2");
  }
  if (!(config.sigma > 0) || !(config.eta > 0) || config.momentum < 0 || config.momentum >= 1) {
    throw std::invalid_argument("run_ch_nes: bad sigma/eta/momentum");
  }
  const int n = config.n_samples;
  const int d = objective.dim();
  Rng rng(config.seed);

  Eigen::VectorXd x = domain.sample(rng);
  Eigen::VectorXd m = Eigen::VectorXd::Zero(d);
  double eta = config.eta;
  const double eta_floor = config.eta * config.min_eta_fraction;
  double best_check = std::numeric_limits<double>::infinity();
  int stall = 0;

  std::vector<Eigen::VectorXd> trajectory;
  for (long long k = 0; k < limits.max_iterations; ++k) {
    if (objective.ledger().remaining() < n + 1) break;

    const Eigen::MatrixXd samples = antithetic_samples(n, d, rng);
    std::vector<Eigen::VectorXd> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) pts.push_back(x + config.sigma * samples.row(i).transpose());
    const std::vector<double> raw = objective.eval_batch(pts);
    Eigen::VectorXd f_values = Eigen::Map<const Eigen::VectorXd>(raw.data(), raw.size());

    const double check = *objective.eval(x);
    if (objective.success()) {
      trajectory.push_back(x);
      objective.ledger().mark_iteration();
      break;
    }

    if (config.schedule == ChNesConfig::Schedule::PlateauDecay) {
      if (check < best_check) {
        best_check = check;
        stall = 0;
      } else if (++stall >= config.patience) {
        eta = std::max(eta * config.decay_factor, eta_floor);
        stall = 0;
      }
    }

    Eigen::VectorXd g = kind.variant == EstimatorKind::Variant::Ch
                            ? ch_gradient(f_values, samples, kind.alpha)
                            : Eigen::VectorXd(-nes_gradient(f_values, samples));
    const double norm = g.norm();
    if (norm > 0) g /= norm;

    m = config.momentum * m + g;
    x += eta * m;
    domain.project(x);

    trajectory.push_back(x);
    objective.ledger().mark_iteration();
  }

  RunRecord record = objective.make_record();
  record.trajectory = std::move(trajectory);
  return record;
}

}  // namespace cbopt
