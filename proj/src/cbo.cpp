#include "cbopt/cbo.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "cbopt/attack_space.hpp"

namespace cbopt {

MinibatchSampler::MinibatchSampler(int n, int b) : n_(n), b_(b) {
  if (b < 1 || b > n) throw std::invalid_argument("MinibatchSampler: need 1 <= b <= n");
}

void MinibatchSampler::reshuffle(Rng& rng) {
  perm_.resize(n_);
  std::iota(perm_.begin(), perm_.end(), 0);
  for (int i = n_ - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.below(static_cast<uint64_t>(i) + 1));
    std::swap(perm_[i], perm_[j]);
  }
  cursor_ = 0;
}

std::vector<int> MinibatchSampler::next(Rng& rng) {
  if (perm_.empty()) reshuffle(rng);
  std::vector<int> batch;
  batch.reserve(b_);
  while (static_cast<int>(batch.size()) < b_) {
    if (cursor_ == n_) {
      reshuffle(rng);
      // Keep the straddling batch duplicate-free: swap any leftover already in
      // the batch out of the prefix we are about to consume.
      const int need = b_ - static_cast<int>(batch.size());
      for (int i = 0; i < need; ++i) {
        while (std::find(batch.begin(), batch.end(), perm_[i]) != batch.end()) {
          std::swap(perm_[i], perm_[n_ - 1 - static_cast<int>(rng.below(static_cast<uint64_t>(n_ - need)))]);
        }
      }
    }
    batch.push_back(perm_[cursor_++]);
  }
  return batch;
}

void cbo_step(Eigen::MatrixXd& particles, const Eigen::VectorXd& consensus, const CboConfig& config,
              NoiseModel& noise, const SearchDomain& domain, Rng& rng) {
  Eigen::MatrixXd drift = particles.rowwise() - consensus.transpose();
  const Eigen::MatrixXd xi = noise.draw(drift, config.tau, rng);
  particles -= config.tau * config.lambda * drift;
  particles += config.sigma * xi;
  for (Eigen::Index i = 0; i < particles.rows(); ++i) {
    Eigen::VectorXd row = particles.row(i).transpose();
    domain.project(row);
    particles.row(i) = row.transpose();
  }
}

namespace {

std::unique_ptr<NoiseModel> build_noise(const CboConfig& config, const SearchDomain& domain,
                                        long long horizon) {
  if (config.noise == NoiseKind::GaussianAnisotropic || config.noise == NoiseKind::GaussianIsotropic) {
    return make_noise(config.noise, config.n_particles, 0, 0, 0, 1.0, horizon);
  }
  const auto* space = dynamic_cast<const AttackSpace*>(&domain);
  if (space == nullptr || space->dim() != space->channels() * space->height() * space->width()) {
    throw std::invalid_argument("structured noise requires an image-shaped search space");
  }
  return make_noise(config.noise, config.n_particles, space->channels(), space->height(),
                    space->width(), space->budget().eps, horizon);
}

}  // namespace

RunRecord run_cbo(Objective& objective, const SearchDomain& domain, const CboConfig& config,
                  const RunLimits& limits) {
  if (!(config.tau > 0) || config.sigma < 0 || config.lambda < 0) {
    throw std::invalid_argument("run_cbo: need tau > 0, sigma >= 0, lambda >= 0");
  }
  const int n = config.n_particles;
  const int d = objective.dim();
  Rng rng(config.seed);
  MinibatchSampler sampler(n, config.batch_size);

  Eigen::MatrixXd particles(n, d);
  std::vector<Eigen::VectorXd> init;
  init.reserve(n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd p = domain.sample(rng);
    particles.row(i) = p.transpose();
    init.push_back(std::move(p));
  }

  std::vector<Eigen::VectorXd> trajectory;
  Eigen::VectorXd values(n);

  const std::vector<double> v0 = objective.eval_batch(init);
  objective.ledger().mark_iteration();
  if (static_cast<int>(v0.size()) == n && !objective.success()) {
    for (int i = 0; i < n; ++i) values[i] = v0[i];

    const long long per_iter = config.batch_size;
    long long horizon = std::min<long long>(limits.max_iterations, objective.ledger().remaining() / per_iter);
    horizon = std::max<long long>(horizon, 1);
    std::unique_ptr<NoiseModel> noise = build_noise(config, domain, horizon);

    for (long long k = 0; k < limits.max_iterations; ++k) {
      if (objective.exhausted()) break;
      const std::vector<int> batch = sampler.next(rng);
      std::vector<Eigen::VectorXd> pts;
      pts.reserve(batch.size());
      for (int idx : batch) pts.push_back(particles.row(idx).transpose());
      const std::vector<double> fresh = objective.eval_batch(pts);
      for (std::size_t i = 0; i < fresh.size(); ++i) values[batch[i]] = fresh[i];

      const double alpha = config.alpha_mode == CboConfig::AlphaMode::Fixed
                               ? config.alpha
                               : schedule_alpha(values, config.eta_ess, config.alpha_bounds);
      const ConsensusResult consensus = compute_consensus(particles, values, alpha);
      trajectory.push_back(consensus.point);
      objective.ledger().mark_iteration();
      if (objective.success() || fresh.size() < batch.size()) break;

      cbo_step(particles, consensus.point, config, *noise, domain, rng);
    }
  }

  RunRecord record = objective.make_record();
  record.trajectory = std::move(trajectory);
  return record;
}

}  // namespace cbopt
