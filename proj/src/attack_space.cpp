#include "cbopt/attack_space.hpp"

#include <cmath>
#include <stdexcept>

#include "cbopt/dct.hpp"

namespace cbopt {

double budget_distance(const ImageTensor& img, const ImageTensor& base, BudgetSpec::Norm norm) {
  const Eigen::ArrayXd d = img.data - base.data;
  return norm == BudgetSpec::Norm::Linf ? d.abs().maxCoeff() : std::sqrt((d * d).sum());
}

ImageTensor enforce_budget(ImageTensor img, const ImageTensor& base, const BudgetSpec& budget) {
  if (img.size() != base.size()) throw std::invalid_argument("enforce_budget: shape mismatch");
  if (budget.norm == BudgetSpec::Norm::Linf) {
    // Range clamp first (base is in [0,1], so the ball clamp below keeps it),
    // then the componentwise ball clamp. base +- eps rounds, which can leave
    // the realized difference half an ulp outside the ball; walk such entries
    // back until the comparison itself holds.
    img.data = img.data.max(0.0).min(1.0);
    for (Eigen::Index i = 0; i < img.data.size(); ++i) {
      const double b = base.data[i];
      double v = std::clamp(img.data[i], b - budget.eps, b + budget.eps);
      while (std::abs(v - b) > budget.eps) v = std::nextafter(v, b);
      img.data[i] = v;
    }
  } else {
    Eigen::ArrayXd d = img.data - base.data;
    const double n = std::sqrt((d * d).sum());
    if (n > budget.eps) img.data = base.data + d * (budget.eps / n);
    img.data = img.data.max(0.0).min(1.0);
  }
  return img;
}

void AttackSpace::check_latent(const Eigen::VectorXd& s) const {
  if (s.size() != dim()) throw std::invalid_argument("attack space: latent length mismatch");
  if (!s.allFinite()) throw std::invalid_argument("attack space: non-finite latent");
}

void AttackSpace::check_image(const ImageTensor& x) const {
  if (x.c != c_ || x.h != h_ || x.w != w_) throw std::invalid_argument("attack space: image shape mismatch");
}

namespace {

Eigen::VectorXd sample_box(int n, double lo, double hi, Rng& rng) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * rng.uniform();
  return v;
}

Eigen::VectorXd sample_l2_ball(int n, double radius, Rng& rng) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal();
  const double norm = v.norm();
  if (norm == 0.0) return Eigen::VectorXd::Zero(n);
  const double r = radius * std::pow(rng.uniform(), 1.0 / n);
  return v * (r / norm);
}

void project_ball(Eigen::VectorXd& v, const BudgetSpec& budget) {
  if (budget.norm == BudgetSpec::Norm::Linf) {
    v = v.array().max(-budget.eps).min(budget.eps);
  } else {
    const double n = v.norm();
    if (n > budget.eps) v *= budget.eps / n;
  }
}

}  // namespace

DirectSpace::DirectSpace(int c, int h, int w, BudgetSpec budget) : AttackSpace(c, h, w, budget) {
  if (c < 1 || h < 1 || w < 1) throw std::invalid_argument("DirectSpace: bad dims");
}

ImageTensor DirectSpace::apply(const Eigen::VectorXd& s, const ImageTensor& x) const {
  check_latent(s);
  check_image(x);
  ImageTensor out = x;
  out.data += s.array();
  return clip01(std::move(out));
}

void DirectSpace::project(Eigen::VectorXd& v) const { project_ball(v, budget_); }

Eigen::VectorXd DirectSpace::sample(Rng& rng) const {
  return budget_.norm == BudgetSpec::Norm::Linf ? sample_box(dim(), -budget_.eps, budget_.eps, rng)
                                                : sample_l2_ball(dim(), budget_.eps, rng);
}

LowResSpace::LowResSpace(int c, int h, int w, int h_low, int w_low, BudgetSpec budget)
    : AttackSpace(c, h, w, budget), h_low_(h_low), w_low_(w_low) {
  if (h_low < 1 || w_low < 1 || h_low > h || w_low > w)
    throw std::invalid_argument("LowResSpace: grid must satisfy 1 <= h_low <= h, 1 <= w_low <= w");
}

ImageTensor LowResSpace::upsample(const Eigen::VectorXd& s) const {
  ImageTensor up(c_, h_, w_);
  for (int ch = 0; ch < c_; ++ch)
    for (int y = 0; y < h_; ++y) {
      const int cy = y * h_low_ / h_;
      for (int x = 0; x < w_; ++x) {
        const int cx = x * w_low_ / w_;
        up.at(ch, y, x) = s[(static_cast<Eigen::Index>(ch) * h_low_ + cy) * w_low_ + cx];
      }
    }
  return up;
}

ImageTensor LowResSpace::apply(const Eigen::VectorXd& s, const ImageTensor& x) const {
  check_latent(s);
  check_image(x);
  ImageTensor out = x;
  out.data += upsample(s).data;
  return clip01(std::move(out));
}

void LowResSpace::project(Eigen::VectorXd& v) const { project_ball(v, budget_); }

Eigen::VectorXd LowResSpace::sample(Rng& rng) const {
  return budget_.norm == BudgetSpec::Norm::Linf ? sample_box(dim(), -budget_.eps, budget_.eps, rng)
                                                : sample_l2_ball(dim(), budget_.eps, rng);
}

std::pair<int, int> pixel_gamma(double pos_y, double pos_x, int h, int w) {
  if (!(pos_y >= 0.0 && pos_y <= 1.0 && pos_x >= 0.0 && pos_x <= 1.0))
    throw std::invalid_argument("pixel_gamma: position outside [0,1]^2");
  const int y = std::min(static_cast<int>(std::floor(pos_y * h)), h - 1);
  const int x = std::min(static_cast<int>(std::floor(pos_x * w)), w - 1);
  return {y, x};
}

PixelSpace::PixelSpace(int c, int h, int w, int pixels, BudgetSpec budget)
    : AttackSpace(c, h, w, budget), pixels_(pixels) {
  if (pixels < 1) throw std::invalid_argument("PixelSpace: need at least one pixel");
}

ImageTensor PixelSpace::apply(const Eigen::VectorXd& s, const ImageTensor& x) const {
  check_latent(s);
  check_image(x);
  ImageTensor out = x;
  for (int p = 0; p < pixels_; ++p) {
    const Eigen::Index base = static_cast<Eigen::Index>(p) * (c_ + 2);
    const auto [y, px] = pixel_gamma(s[base + c_], s[base + c_ + 1], h_, w_);
    for (int ch = 0; ch < c_; ++ch) out.at(ch, y, px) += s[base + ch];
  }
  return clip01(std::move(out));
}

void PixelSpace::project(Eigen::VectorXd& v) const { v = v.array().max(0.0).min(1.0); }

Eigen::VectorXd PixelSpace::sample(Rng& rng) const { return sample_box(dim(), 0.0, 1.0, rng); }

Eigen::VectorXd PixelSpace::neutral() const { return Eigen::VectorXd::Zero(dim()); }

DctSpace::DctSpace(int c, int h, int w, int modes, BudgetSpec budget)
    : AttackSpace(c, h, w, budget), modes_(modes) {
  if (modes < 1 || modes > h || modes > w) throw std::invalid_argument("DctSpace: modes out of range");
  if (budget.norm != BudgetSpec::Norm::L2) throw std::invalid_argument("DctSpace: requires an L2 budget");
}

ImageTensor DctSpace::apply(const Eigen::VectorXd& s, const ImageTensor& x) const {
  check_latent(s);
  check_image(x);
  ImageTensor pert = dct_inverse(dct_place(s, modes_, c_, h_, w_));
  ImageTensor out = x;
  out.data += pert.data;
  return clip01(std::move(out));
}

void DctSpace::project(Eigen::VectorXd& v) const {
  const double n = v.norm();
  if (n > budget_.eps) v *= budget_.eps / n;
}

Eigen::VectorXd DctSpace::sample(Rng& rng) const { return sample_l2_ball(dim(), budget_.eps, rng); }

SquareSpace::SquareSpace(int c, int h, int w, int squares, double eps, uint64_t ctx_seed)
    : AttackSpace(c, h, w, BudgetSpec{BudgetSpec::Norm::Linf, eps}), squares_(squares) {
  if (squares < 1) throw std::invalid_argument("SquareSpace: need at least one square");
  if (!(eps > 0.0)) throw std::invalid_argument("SquareSpace: eps must be positive");
  Rng rng(ctx_seed);
  zeta_.resize(squares, c);
  for (int p = 0; p < squares; ++p)
    for (int ch = 0; ch < c; ++ch) zeta_(p, ch) = rng.uniform() < 0.5 ? -eps : eps;
  stripes_.resize(c, w);
  for (int ch = 0; ch < c; ++ch)
    for (int x = 0; x < w; ++x) stripes_(ch, x) = rng.uniform() < 0.5 ? -eps : eps;
}

ImageTensor SquareSpace::apply(const Eigen::VectorXd& s, const ImageTensor& x) const {
  check_latent(s);
  check_image(x);
  ImageTensor pert(c_, h_, w_);
  for (int ch = 0; ch < c_; ++ch)
    for (int y = 0; y < h_; ++y)
      for (int px = 0; px < w_; ++px) pert.at(ch, y, px) = stripes_(ch, px);
  for (int p = 0; p < squares_; ++p) {
    const double r1 = s[3 * p], r2 = s[3 * p + 1], r3 = s[3 * p + 2];
    if (!(r1 >= -1e-9 && r1 <= 1.0 + 1e-9 && r2 >= -1e-9 && r2 <= 1.0 + 1e-9 && r3 >= -1e-9 && r3 <= 1.0 + 1e-9))
      throw std::invalid_argument("SquareSpace: triple outside [0,1]^3");
    // Pixel centers (y+0.5)/H within the sup-norm ball of radius r1 around (r2, r3).
    const int ylo = std::max(0, static_cast<int>(std::ceil(h_ * (r2 - r1) - 0.5)));
    const int yhi = std::min(h_ - 1, static_cast<int>(std::floor(h_ * (r2 + r1) - 0.5)));
    const int xlo = std::max(0, static_cast<int>(std::ceil(w_ * (r3 - r1) - 0.5)));
    const int xhi = std::min(w_ - 1, static_cast<int>(std::floor(w_ * (r3 + r1) - 0.5)));
    for (int ch = 0; ch < c_; ++ch)
      for (int y = ylo; y <= yhi; ++y)
        for (int px = xlo; px <= xhi; ++px) pert.at(ch, y, px) += zeta_(p, ch);
  }
  pert.data = pert.data.max(-budget_.eps).min(budget_.eps);
  ImageTensor out = x;
  out.data += pert.data;
  // The clamped sum re-rounds when added to x; enforce the ball exactly.
  return enforce_budget(std::move(out), x, budget_);
}

void SquareSpace::project(Eigen::VectorXd& v) const { v = v.array().max(0.0).min(1.0); }

Eigen::VectorXd SquareSpace::sample(Rng& rng) const { return sample_box(dim(), 0.0, 1.0, rng); }

Eigen::VectorXd SquareSpace::neutral() const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim());
  for (int p = 0; p < squares_; ++p) {
    v[3 * p + 1] = 0.5;
    v[3 * p + 2] = 0.5;
  }
  return v;
}

std::unique_ptr<AttackSpace> make_space(const SpaceSpec& spec, int c, int h, int w, uint64_t ctx_seed) {
  switch (spec.kind) {
    case SpaceSpec::Kind::Direct:
      return std::make_unique<DirectSpace>(c, h, w, spec.budget);
    case SpaceSpec::Kind::LowRes:
      return std::make_unique<LowResSpace>(c, h, w, spec.h_low, spec.w_low, spec.budget);
    case SpaceSpec::Kind::Pixel:
      return std::make_unique<PixelSpace>(c, h, w, spec.pixels, spec.budget);
    case SpaceSpec::Kind::Dct:
      return std::make_unique<DctSpace>(c, h, w, spec.modes, spec.budget);
    case SpaceSpec::Kind::Square:
      if (spec.budget.norm != BudgetSpec::Norm::Linf)
        throw std::invalid_argument("SquareSpace: requires an Linf budget");
      return std::make_unique<SquareSpace>(c, h, w, spec.squares, spec.budget.eps, ctx_seed);
  }
  throw std::invalid_argument("make_space: unknown kind");
}

}  // namespace cbopt
