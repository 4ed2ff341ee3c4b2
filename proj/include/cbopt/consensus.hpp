#pragma once

#include <Eigen/Dense>

namespace cbopt {

struct ConsensusWeights {
  Eigen::VectorXd weights;  // nonnegative, sums to 1
  double alpha = 0.0;
};

struct ConsensusResult {
  Eigen::VectorXd point;
  ConsensusWeights weights;
};

// Softmax(-alpha * values)-weighted particle mean, LogSumExp-stabilized so
// alpha * range(values) up to ~1e6 stays finite.
ConsensusResult compute_consensus(const Eigen::MatrixXd& particles, const Eigen::VectorXd& values,
                                  double alpha);

// Effective sample size (sum w)^2 / sum w^2 of the consensus weights.
double effective_sample_size(const Eigen::VectorXd& values, double alpha);

struct AlphaBounds {
  double min = 1e-4;
  double max = 1e8;
};

// Bisection (log scale, 60 iterations max) for the alpha whose effective
// sample size hits eta_ess * N within 1% relative tolerance; returns the
// nearest bracket bound when the target is unattainable. Equal values make
// the ESS constant at N; that saturates to bounds.max.
double schedule_alpha(const Eigen::VectorXd& values, double eta_ess, AlphaBounds bounds = {});

}  // namespace cbopt
