#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cbopt/consensus.hpp"
#include "cbopt/domain.hpp"
#include "cbopt/noise.hpp"
#include "cbopt/objective.hpp"
#include "cbopt/rng.hpp"

namespace cbopt {

struct CboConfig {
  double tau = 1.3;
  double lambda = 1.0;
  double sigma = 1.0;
  int n_particles = 50;
  int batch_size = 10;

  enum class AlphaMode { Fixed, EssScheduled };
  AlphaMode alpha_mode = AlphaMode::EssScheduled;
  double alpha = 10.0;    // Fixed
  double eta_ess = 0.1;   // EssScheduled: target ESS = eta_ess * N
  AlphaBounds alpha_bounds;

  NoiseKind noise = NoiseKind::GaussianAnisotropic;
  uint64_t seed = 1;
};

// Hands out batches of `b` distinct indices; across ceil(n/b) consecutive
// calls every index appears exactly once before any repeats. When b does not
// divide n, a batch straddling two permutations is padded from the next one,
// keeping its entries distinct.
class MinibatchSampler {
 public:
  MinibatchSampler(int n, int b);
  std::vector<int> next(Rng& rng);

 private:
  void reshuffle(Rng& rng);

  int n_, b_;
  std::vector<int> perm_;
  int cursor_ = 0;
};

// One Euler step x <- x - tau*lambda*(x - c) + sigma*noise, every particle,
// followed by the feasible-set projection. With tau*lambda = 1 and sigma = 0
// the ensemble collapses onto c exactly.
void cbo_step(Eigen::MatrixXd& particles, const Eigen::VectorXd& consensus, const CboConfig& config,
              NoiseModel& noise, const SearchDomain& domain, Rng& rng);

// Full consensus-based run: uniform feasible initialization, one full-ensemble
// evaluation, then per-iteration mini-batch refresh, alpha schedule, consensus,
// step. Stops at the first adversarial query (objective value < 0), on budget
// exhaustion, or at the iteration cap. The trajectory holds the per-iteration
// consensus points.
RunRecord run_cbo(Objective& objective, const SearchDomain& domain, const CboConfig& config,
                  const RunLimits& limits);

}  // namespace cbopt
