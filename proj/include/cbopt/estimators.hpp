#pragma once

#include <Eigen/Dense>
#include <functional>

#include "cbopt/domain.hpp"
#include "cbopt/objective.hpp"
#include "cbopt/rng.hpp"

namespace cbopt {

// First N/2 rows i.i.d. standard Gaussian, second half their negations, so
// every column sums to exactly zero. N must be even.
Eigen::MatrixXd antithetic_samples(int n, int d, Rng& rng);

// (1/N) sum_n f_n * samples_n: the mean-only Gaussian search-distribution
// gradient (an ascent direction for f), before any sigma/eta scaling.
Eigen::VectorXd nes_gradient(const Eigen::VectorXd& f_values, const Eigen::MatrixXd& samples);

// softmax(-alpha f)-weighted sample sum, LogSumExp-stabilized: the hop toward
// the samples' consensus, already a descent displacement for minimizing f.
Eigen::VectorXd ch_gradient(const Eigen::VectorXd& f_values, const Eigen::MatrixXd& samples,
                            double alpha);

using ScalarFn = std::function<double(const Eigen::VectorXd&)>;

// Monte-Carlo estimates of the smoothed one-step displacements, used to check
// the tau * grad f expansions. The *_at forms consume a precomputed M x d
// sample matrix so the two estimators can share identical draws.
//   nes: eta * sigma * E[ f(mu + sigma xi) xi ]
//   ch:  sigma_tilde * E[ exp(-alpha f(c + sigma_tilde xi)) xi ] / E[ exp(...) ]
Eigen::VectorXd nes_expected_step_at(const ScalarFn& f, const Eigen::VectorXd& mu, double sigma,
                                     double eta, const Eigen::MatrixXd& samples);
Eigen::VectorXd nes_expected_step(const ScalarFn& f, const Eigen::VectorXd& mu, double sigma,
                                  double eta, long long m, Rng& rng, bool antithetic = false);
Eigen::VectorXd ch_expected_step_at(const ScalarFn& f, const Eigen::VectorXd& c, double sigma_tilde,
                                    double alpha, const Eigen::MatrixXd& samples);
Eigen::VectorXd ch_expected_step(const ScalarFn& f, const Eigen::VectorXd& c, double sigma_tilde,
                                 double alpha, long long m, Rng& rng, bool antithetic = false);

struct EstimatorKind {
  enum class Variant { Nes, Ch };
  Variant variant = Variant::Nes;
  double alpha = 10.0;  // CH inverse temperature
};

struct ChNesConfig {
  double sigma = 0.1;   // sample scale
  double eta = 0.05;    // step size
  int n_samples = 20;   // N, even: antithetic pairing
  double momentum = 0.9;

  enum class Schedule { Constant, PlateauDecay };
  Schedule schedule = Schedule::PlateauDecay;
  double decay_factor = 0.5;
  int patience = 20;                     // non-improving checks before a decay
  double min_eta_fraction = 1.0 / 64.0;  // eta never drops below eta * this

  uint64_t seed = 1;
};

// Shared single-point loop for both estimators: per iteration, N antithetic
// sample queries around the iterate, one check query at the iterate itself,
// l2-normalized estimate, momentum, step, projection. NES output is negated
// into the common descent convention. Costs exactly N+1 queries per iteration
// and stops on success, at the iteration cap, or once the remaining budget
// cannot cover another iteration.
RunRecord run_ch_nes(Objective& objective, const SearchDomain& domain, const ChNesConfig& config,
                     const EstimatorKind& kind, const RunLimits& limits);

}  // namespace cbopt
