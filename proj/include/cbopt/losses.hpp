#pragma once

#include <Eigen/Dense>

namespace cbopt {

// Index of the largest logit; ties resolve to the lowest index.
int argmax_label(const Eigen::VectorXd& logits);

// Untargeted margin in minimization convention:
//   f = y_label - max_{k != label} y_k,  f < 0 iff the input is misclassified.
// maximization_sign = true returns the negated (maximization-convention)
// value; the rest of the framework always consumes the default form.
double margin_loss(const Eigen::VectorXd& logits, int label, bool maximization_sign = false);

// Targeted cross-entropy: f = logsumexp(y) - y_target, always >= 0.
double targeted_ce_loss(const Eigen::VectorXd& logits, int target);

struct LossSpec {
  enum class Kind { UntargetedMargin, TargetedCe };
  Kind kind = Kind::UntargetedMargin;
  int label = -1;    // true label (untargeted)
  int target = -1;   // target label (targeted)
  double shift = 10.0;
};

// Applies the success shift to a precomputed loss value. Untargeted losses
// pass through (the sign already encodes success); targeted losses get
// `spec.shift` subtracted exactly when argmax(logits) == target.
// A queried input is adversarial iff the shifted value is < 0.
double shifted_loss(double f_value, const Eigen::VectorXd& logits, const LossSpec& spec);

// Raw loss followed by the shift: the objective the optimizers minimize.
double attack_loss(const Eigen::VectorXd& logits, const LossSpec& spec);

}  // namespace cbopt
