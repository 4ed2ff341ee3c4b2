#include "cbopt/consensus.hpp"

#include <cmath>
#include <stdexcept>

namespace cbopt {

ConsensusResult compute_consensus(const Eigen::MatrixXd& particles, const Eigen::VectorXd& values,
                                  double alpha) {
  const Eigen::Index n = particles.rows();
  if (n == 0) throw std::invalid_argument("compute_consensus: empty ensemble");
  if (values.size() != n) throw std::invalid_argument("compute_consensus: value count mismatch");
  if (!values.allFinite() || !particles.allFinite())
    throw std::invalid_argument("compute_consensus: non-finite input");
  if (!(alpha > 0.0)) throw std::invalid_argument("compute_consensus: alpha must be positive");

  const Eigen::ArrayXd s = -alpha * values.array();
  const double m = s.maxCoeff();
  Eigen::ArrayXd w = (s - m).exp();
  w /= w.sum();

  ConsensusResult out;
  out.weights.weights = w.matrix();
  out.weights.alpha = alpha;
  out.point = particles.transpose() * out.weights.weights;
  return out;
}

double effective_sample_size(const Eigen::VectorXd& values, double alpha) {
  const Eigen::ArrayXd s = -alpha * values.array();
  const double m = s.maxCoeff();
  const Eigen::ArrayXd e = (s - m).exp();
  const double s1 = e.sum();
  const double s2 = (e * e).sum();
  return s1 * s1 / s2;
}

double schedule_alpha(const Eigen::VectorXd& values, double eta_ess, AlphaBounds bounds) {
  const Eigen::Index n = values.size();
  if (n == 0) throw std::invalid_argument("schedule_alpha: empty values");
  if (!values.allFinite()) throw std::invalid_argument("schedule_alpha: non-finite values");
  if (!(eta_ess > 0.0 && eta_ess <= 1.0)) throw std::invalid_argument("schedule_alpha: eta_ess in (0,1]");
  if (!(bounds.min > 0.0 && bounds.max > bounds.min)) throw std::invalid_argument("schedule_alpha: bad bounds");

  if (values.maxCoeff() == values.minCoeff()) return bounds.max;

  const double target = eta_ess * static_cast<double>(n);
  if (target >= effective_sample_size(values, bounds.min)) return bounds.min;
  if (target <= effective_sample_size(values, bounds.max)) return bounds.max;

  double lo = std::log(bounds.min), hi = std::log(bounds.max);
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 60; ++it) {
    mid = 0.5 * (lo + hi);
    const double j = effective_sample_size(values, std::exp(mid));
    if (std::abs(j - target) <= 0.01 * target) break;
    // ESS is non-increasing in alpha: too many effective samples -> raise alpha.
    (j > target ? lo : hi) = mid;
  }
  return std::exp(mid);
}

}  // namespace cbopt
