#include "cbopt/es.hpp"

#include <cmath>
#include <stdexcept>

namespace cbopt {

Eigen::VectorXd cauchy_mutation(int d, double scale, Rng& rng) {
  if (d < 1) throw std::invalid_argument("cauchy_mutation: need d >= 1");
  if (!(scale > 0)) throw std::invalid_argument("cauchy_mutation: scale must be positive");
  Eigen::VectorXd v(d);
  for (int j = 0; j < d; ++j) v[j] = scale * std::tan(M_PI * (rng.uniform() - 0.5));
  return v;
}

namespace {

Eigen::VectorXd mutation(const EsConfig& config, int d, Rng& rng) {
  switch (config.noise) {
    case EsConfig::Noise::Gaussian: {
      Eigen::VectorXd v(d);
      for (int j = 0; j < d; ++j) v[j] = config.tau_mut * rng.normal();
      return v;
    }
    case EsConfig::Noise::Cauchy:
      return cauchy_mutation(d, config.tau_mut, rng);
    case EsConfig::Noise::BasisAxis: {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
      const int axis = static_cast<int>(rng.below(static_cast<uint64_t>(d)));
      v[axis] = rng.below(2) == 0 ? config.tau_mut : -config.tau_mut;
      return v;
    }
  }
  throw std::invalid_argument("mutation: unknown noise kind");
}

}  // namespace

RunRecord run_one_plus_lambda(Objective& objective, const SearchDomain& domain, const EsConfig& config,
                              const RunLimits& limits) {
  if (!(config.tau_mut > 0) || config.lambda_cand < 1) {
    throw std::invalid_argument("run_one_plus_lambda: bad config");
  }
  const int d = objective.dim();
  Rng rng(config.seed);

  Eigen::VectorXd x = domain.sample(rng);
  std::vector<Eigen::VectorXd> trajectory;

  const std::optional<double> f0 = objective.eval(x);
  objective.ledger().mark_iteration();
  RunRecord out;
  if (!f0 || objective.success()) {
    out = objective.make_record();
    out.trajectory = std::move(trajectory);
    return out;
  }
  double fx = *f0;

  for (long long k = 0; k < limits.max_iterations; ++k) {
    bool exhausted = false;
    if (config.simba_rule) {
      Eigen::VectorXd step = Eigen::VectorXd::Zero(d);
      step[static_cast<int>(rng.below(static_cast<uint64_t>(d)))] = config.tau_mut;
      Eigen::VectorXd plus = x + step;
      domain.project(plus);
      const std::optional<double> fplus = objective.eval(plus);
      if (!fplus) {
        exhausted = true;
      } else if (*fplus < fx) {
        x = plus;
        fx = *fplus;
      } else {
        Eigen::VectorXd minus = x - step;
        domain.project(minus);
        const std::optional<double> fminus = objective.eval(minus);
        if (!fminus) {
          exhausted = true;
        } else if (*fminus < fx) {
          x = minus;
          fx = *fminus;
        }
      }
    } else {
      for (int i = 0; i < config.lambda_cand; ++i) {
        Eigen::VectorXd cand = x + mutation(config, d, rng);
        domain.project(cand);
        const std::optional<double> fc = objective.eval(cand);
        if (!fc) {
          exhausted = true;
          break;
        }
        if (*fc < fx) {
          x = cand;
          fx = *fc;
        }
      }
    }

    trajectory.push_back(x);
    objective.ledger().mark_iteration();
    if (exhausted || objective.success()) break;
  }

  out = objective.make_record();
  out.trajectory = std::move(trajectory);
  return out;
}

RunRecord run_cauchy_es(Objective& objective, const SearchDomain& domain, const EsConfig& config,
                        const RunLimits& limits) {
  EsConfig c = config;
  c.lambda_cand = 1;
  c.noise = EsConfig::Noise::Cauchy;
  c.simba_rule = false;
  return run_one_plus_lambda(objective, domain, c, limits);
}

}  // namespace cbopt
