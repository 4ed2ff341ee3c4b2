#include "cbopt/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace cbopt {

int argmax_label(const Eigen::VectorXd& logits) {
  if (logits.size() == 0) throw std::invalid_argument("argmax_label: empty logits");
  int best = 0;
  for (int i = 1; i < logits.size(); ++i)
    if (logits[i] > logits[best]) best = i;
  return best;
}

double margin_loss(const Eigen::VectorXd& logits, int label, bool maximization_sign) {
  if (logits.size() < 2) throw std::invalid_argument("margin_loss: need at least two classes");
  if (label < 0 || label >= logits.size()) throw std::invalid_argument("margin_loss: label out of range");
  double other = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < logits.size(); ++i)
    if (i != label) other = std::max(other, logits[i]);
  const double f = logits[label] - other;
  return maximization_sign ? -f : f;
}

double targeted_ce_loss(const Eigen::VectorXd& logits, int target) {
  if (logits.size() < 2) throw std::invalid_argument("targeted_ce_loss: need at least two classes");
  if (target < 0 || target >= logits.size()) throw std::invalid_argument("targeted_ce_loss: target out of range");
  const double m = logits.maxCoeff();
  double s = 0.0;
  for (int i = 0; i < logits.size(); ++i) s += std::exp(logits[i] - m);
  return m + std::log(s) - logits[target];
}

double shifted_loss(double f_value, const Eigen::VectorXd& logits, const LossSpec& spec) {
  if (spec.kind == LossSpec::Kind::TargetedCe && argmax_label(logits) == spec.target)
    return f_value - spec.shift;
  return f_value;
}

double attack_loss(const Eigen::VectorXd& logits, const LossSpec& spec) {
  const double f = spec.kind == LossSpec::Kind::UntargetedMargin
                       ? margin_loss(logits, spec.label)
                       : targeted_ce_loss(logits, spec.target);
  return shifted_loss(f, logits, spec);
}

}  // namespace cbopt
