#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "cbopt/rng.hpp"

namespace cbopt {

enum class NoiseKind { GaussianAnisotropic, GaussianIsotropic, DctBasis, Square };

// Per-iteration ensemble perturbation, N x d. Gaussian models scale by the
// drift (particle minus consensus); the structured models ignore the drift
// argument entirely and carry their own scale, so the caller adds
// sigma * draw(...) either way.
class NoiseModel {
 public:
  virtual ~NoiseModel() = default;
  virtual Eigen::MatrixXd draw(const Eigen::MatrixXd& drift, double tau, Rng& rng) = 0;
};

// entry (n,j) = sqrt(tau) * |drift_nj| * xi  (anisotropic), or row n scaled by
// the row's Euclidean norm instead (isotropic).
class GaussianNoise : public NoiseModel {
 public:
  explicit GaussianNoise(bool isotropic) : isotropic_(isotropic) {}
  Eigen::MatrixXd draw(const Eigen::MatrixXd& drift, double tau, Rng& rng) override;

 private:
  bool isotropic_;
};

// Row n = sqrt(tau) * D^-1(b^(I^n_j)): the inverse DCT image of one basis
// vector, selected by particle n's private index permutation at a cursor j
// shared across the ensemble. The cursor advances once per draw and the
// permutations are redrawn when it wraps, so over d consecutive draws each
// particle visits every basis vector exactly once.
class DctBasisNoise : public NoiseModel {
 public:
  DctBasisNoise(int n_particles, int c, int h, int w);
  Eigen::MatrixXd draw(const Eigen::MatrixXd& drift, double tau, Rng& rng) override;

  int cursor() const { return cursor_; }

 private:
  void refresh_permutations(Rng& rng);

  int n_, c_, h_, w_, d_;
  int cursor_ = 0;
  std::vector<std::vector<int>> perms_;  // empty until the first draw
};

// Row n = sqrt(tau) * (a random square patch): an h_k x h_k pixel block at a
// uniform position, every channel filled with its own random sign times eps,
// zeros elsewhere. The side length follows a staged schedule: the initial
// square covers p0 = 10% of the pixels and p halves as the consumed fraction
// of the draw horizon passes {0.1%, 0.5%, 2%, 10%, 50%}.
class SquareNoise : public NoiseModel {
 public:
  SquareNoise(int c, int h, int w, double eps, long long horizon);
  Eigen::MatrixXd draw(const Eigen::MatrixXd& drift, double tau, Rng& rng) override;

  // Side length the schedule yields at a given draw index.
  int side_for(long long draw_index) const;
  long long draws() const { return draws_; }

 private:
  int c_, h_, w_;
  double eps_;
  long long horizon_;
  long long draws_ = 0;
};

// n_particles and the image dims are only consulted by the structured kinds;
// eps and horizon only by Square.
std::unique_ptr<NoiseModel> make_noise(NoiseKind kind, int n_particles, int c, int h, int w,
                                       double eps, long long horizon);

}  // namespace cbopt
