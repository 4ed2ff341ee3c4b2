#include "cbopt/noise.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cbopt/dct.hpp"
#include "cbopt/tensor.hpp"

namespace cbopt {

Eigen::MatrixXd GaussianNoise::draw(const Eigen::MatrixXd& drift, double tau, Rng& rng) {
  const Eigen::Index n = drift.rows(), d = drift.cols();
  const double root_tau = std::sqrt(tau);
  Eigen::MatrixXd out(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (isotropic_) {
      const double scale = root_tau * drift.row(i).norm();
      for (Eigen::Index j = 0; j < d; ++j) out(i, j) = scale * rng.normal();
    } else {
      for (Eigen::Index j = 0; j < d; ++j) out(i, j) = root_tau * std::abs(drift(i, j)) * rng.normal();
    }
  }
  return out;
}

DctBasisNoise::DctBasisNoise(int n_particles, int c, int h, int w)
    : n_(n_particles), c_(c), h_(h), w_(w), d_(c * h * w) {
  if (n_ < 1 || d_ < 1) throw std::invalid_argument("DctBasisNoise: bad dimensions");
}

void DctBasisNoise::refresh_permutations(Rng& rng) {
  perms_.assign(n_, std::vector<int>(d_));
  for (auto& p : perms_) {
    std::iota(p.begin(), p.end(), 0);
    for (int i = d_ - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.below(static_cast<uint64_t>(i) + 1));
      std::swap(p[i], p[j]);
    }
  }
}

Eigen::MatrixXd DctBasisNoise::draw(const Eigen::MatrixXd& drift, double tau, Rng& rng) {
  if (drift.rows() != n_ || drift.cols() != d_) {
    throw std::invalid_argument("DctBasisNoise: drift shape does not match the ensemble");
  }
  if (perms_.empty()) refresh_permutations(rng);
  const double root_tau = std::sqrt(tau);
  Eigen::MatrixXd out(n_, d_);
  ImageTensor coeff(c_, h_, w_);
  for (int i = 0; i < n_; ++i) {
    const int k = perms_[i][cursor_];
    coeff.data[k] = 1.0;
    const ImageTensor basis = dct_inverse(coeff);
    out.row(i) = root_tau * basis.data.matrix().transpose();
    coeff.data[k] = 0.0;
  }
  ++cursor_;
  if (cursor_ == d_) {
    cursor_ = 0;
    refresh_permutations(rng);
  }
  return out;
}

SquareNoise::SquareNoise(int c, int h, int w, double eps, long long horizon)
    : c_(c), h_(h), w_(w), eps_(eps), horizon_(horizon) {
  if (c_ < 1 || h_ < 1 || w_ < 1) throw std::invalid_argument("SquareNoise: bad dimensions");
  if (!(eps_ > 0.0)) throw std::invalid_argument("SquareNoise: eps must be positive");
}

int SquareNoise::side_for(long long draw_index) const {
  const double frac = horizon_ > 0 ? static_cast<double>(draw_index) / static_cast<double>(horizon_) : 1.0;
  double p = 0.10;
  for (double t : {0.001, 0.005, 0.02, 0.1, 0.5}) {
    if (frac >= t) p *= 0.5;
  }
  const long long side = std::llround(std::sqrt(p * h_ * w_));
  return static_cast<int>(std::clamp(side, 1LL, static_cast<long long>(std::min(h_, w_))));
}

Eigen::MatrixXd SquareNoise::draw(const Eigen::MatrixXd& drift, double tau, Rng& rng) {
  const Eigen::Index n = drift.rows();
  if (drift.cols() != static_cast<Eigen::Index>(c_) * h_ * w_) {
    throw std::invalid_argument("SquareNoise: drift width does not match the image dims");
  }
  const int side = side_for(draws_);
  const double mag = std::sqrt(tau) * eps_;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, drift.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    const int top = static_cast<int>(rng.below(static_cast<uint64_t>(h_ - side + 1)));
    const int left = static_cast<int>(rng.below(static_cast<uint64_t>(w_ - side + 1)));
    for (int ch = 0; ch < c_; ++ch) {
      const double v = rng.below(2) == 0 ? -mag : mag;
      for (int y = top; y < top + side; ++y) {
        const Eigen::Index base = (static_cast<Eigen::Index>(ch) * h_ + y) * w_ + left;
        for (int x = 0; x < side; ++x) out(i, base + x) = v;
      }
    }
  }
  ++draws_;
  return out;
}

std::unique_ptr<NoiseModel> make_noise(NoiseKind kind, int n_particles, int c, int h, int w,
                                       double eps, long long horizon) {
  switch (kind) {
    case NoiseKind::GaussianAnisotropic:
      return std::make_unique<GaussianNoise>(false);
    case NoiseKind::GaussianIsotropic:
      return std::make_unique<GaussianNoise>(true);
    case NoiseKind::DctBasis:
      return std::make_unique<DctBasisNoise>(n_particles, c, h, w);
    case NoiseKind::Square:
      return std::make_unique<SquareNoise>(c, h, w, eps, horizon);
  }
  throw std::invalid_argument("make_noise: unknown kind");
}

}  // namespace cbopt
