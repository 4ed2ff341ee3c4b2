#pragma once

#include <Eigen/Dense>

#include "cbopt/domain.hpp"
#include "cbopt/objective.hpp"
#include "cbopt/rng.hpp"

namespace cbopt {

struct EsConfig {
  double tau_mut = 0.1;  // mutation scale
  int lambda_cand = 1;   // candidates per iteration

  enum class Noise { Gaussian, Cauchy, BasisAxis };
  Noise noise = Noise::Gaussian;

  // SimBA candidate rule: one fresh basis axis per iteration, the negated
  // axis evaluated only when the positive one fails to improve.
  bool simba_rule = false;

  uint64_t seed = 1;
};

// d i.i.d. standard Cauchy draws times scale, via inverse CDF
// scale * tan(pi * (u - 1/2)).
Eigen::VectorXd cauchy_mutation(int d, double scale, Rng& rng);

// (1+lambda) iterate-plus-candidates loop. Candidates are projected into the
// feasible set before evaluation, the incumbent keeps its cached value (no
// re-query), and the argmin of {incumbent, candidates} wins with ties kept by
// the incumbent; f(iterate) is therefore non-increasing.
RunRecord run_one_plus_lambda(Objective& objective, const SearchDomain& domain, const EsConfig& config,
                              const RunLimits& limits);

// (1+1) with Cauchy mutations and strict-improvement acceptance at a fixed
// mutation scale.
RunRecord run_cauchy_es(Objective& objective, const SearchDomain& domain, const EsConfig& config,
                        const RunLimits& limits);

}  // namespace cbopt
