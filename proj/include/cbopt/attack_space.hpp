#pragma once

#include <Eigen/Dense>
#include <memory>

#include "cbopt/domain.hpp"
#include "cbopt/tensor.hpp"

namespace cbopt {

struct BudgetSpec {
  enum class Norm { Linf, L2 };
  Norm norm = Norm::Linf;
  double eps = 0.05;
};

// phi(img, base) for the budget's norm.
double budget_distance(const ImageTensor& img, const ImageTensor& base, BudgetSpec::Norm norm);

// Final post-processing: projects img onto the budget ball around base and
// back into [0,1]. For Linf this is an exact componentwise clamp; for L2 a
// radial rescale followed by the range clamp (which never increases the
// distance to base).
ImageTensor enforce_budget(ImageTensor img, const ImageTensor& base, const BudgetSpec& budget);

// A latent parameterization s -> T(s; x) of perturbed images, together with
// the feasible-set geometry the optimizers need. Application maps are pure;
// instances are immutable after construction.
class AttackSpace : public SearchDomain {
 public:
  AttackSpace(int c, int h, int w, BudgetSpec budget) : c_(c), h_(h), w_(w), budget_(budget) {}

  virtual ImageTensor apply(const Eigen::VectorXd& s, const ImageTensor& x) const = 0;

  const BudgetSpec& budget() const { return budget_; }
  int channels() const { return c_; }
  int height() const { return h_; }
  int width() const { return w_; }

 protected:
  void check_latent(const Eigen::VectorXd& s) const;
  void check_image(const ImageTensor& x) const;

  int c_, h_, w_;
  BudgetSpec budget_;
};

// T(s;x) = R(x + s), s image-shaped.
class DirectSpace : public AttackSpace {
 public:
  DirectSpace(int c, int h, int w, BudgetSpec budget);
  int dim() const override { return c_ * h_ * w_; }
  ImageTensor apply(const Eigen::VectorXd& s, const ImageTensor& x) const override;
  void project(Eigen::VectorXd& v) const override;
  Eigen::VectorXd sample(Rng& rng) const override;
  Eigen::VectorXd neutral() const override { return Eigen::VectorXd::Zero(dim()); }
};

// T(s;x) = R(x + I(s)) with nearest-neighbor upsampling from a coarse grid;
// pixel (h,w) reads low-res cell (floor(h*h_low/H), floor(w*w_low/W)).
class LowResSpace : public AttackSpace {
 public:
  LowResSpace(int c, int h, int w, int h_low, int w_low, BudgetSpec budget);
  int dim() const override { return c_ * h_low_ * w_low_; }
  ImageTensor apply(const Eigen::VectorXd& s, const ImageTensor& x) const override;
  void project(Eigen::VectorXd& v) const override;
  Eigen::VectorXd sample(Rng& rng) const override;
  Eigen::VectorXd neutral() const override { return Eigen::VectorXd::Zero(dim()); }

  ImageTensor upsample(const Eigen::VectorXd& s) const;

 private:
  int h_low_, w_low_;
};

// Maps a normalized position to a pixel index; the pos=1.0 boundary clamps
// to the last index. 0-based.
std::pair<int, int> pixel_gamma(double pos_y, double pos_x, int h, int w);

// P tuples (zeta in [0,1]^C, pi in [0,1]^2); adds zeta at pixel gamma(pi),
// contributions at colliding positions sum before the range clip.
// Latent layout per tuple: [zeta_0 .. zeta_{C-1}, pi_y, pi_x].
class PixelSpace : public AttackSpace {
 public:
  PixelSpace(int c, int h, int w, int pixels, BudgetSpec budget);
  int dim() const override { return pixels_ * (c_ + 2); }
  ImageTensor apply(const Eigen::VectorXd& s, const ImageTensor& x) const override;
  void project(Eigen::VectorXd& v) const override;
  Eigen::VectorXd sample(Rng& rng) const override;
  Eigen::VectorXd neutral() const override;

 private:
  int pixels_;
};

// T(s;x) = R(D^-1(P(s)) + x): latent holds the low-frequency DCT block
// (c*m*m coefficients); the inverse transform is an L2 isometry. Requires an
// L2 budget; the latent feasible set is the L2 ball of radius eps.
class DctSpace : public AttackSpace {
 public:
  DctSpace(int c, int h, int w, int modes, BudgetSpec budget);
  int dim() const override { return c_ * modes_ * modes_; }
  ImageTensor apply(const Eigen::VectorXd& s, const ImageTensor& x) const override;
  void project(Eigen::VectorXd& v) const override;
  Eigen::VectorXd sample(Rng& rng) const override;
  Eigen::VectorXd neutral() const override { return Eigen::VectorXd::Zero(dim()); }

 private:
  int modes_;
};

// P axis-aligned squares over a fixed vertical-stripes background. Latent
// triples (r1 side, r2, r3 position) in [0,1]^3 select pixels whose centers
// ((h+0.5)/H, (w+0.5)/W) lie in the sup-norm ball of radius r1 around
// (r2, r3); each square writes its fixed per-channel sign ctx value. The sum
// plus stripes is clamped to [-eps, eps] before being added to x, so the
// Linf budget holds bit-exactly. r1=0 selects no pixel centers: the neutral
// latent reproduces x + C(stripes).
class SquareSpace : public AttackSpace {
 public:
  SquareSpace(int c, int h, int w, int squares, double eps, uint64_t ctx_seed);
  int dim() const override { return 3 * squares_; }
  ImageTensor apply(const Eigen::VectorXd& s, const ImageTensor& x) const override;
  void project(Eigen::VectorXd& v) const override;
  Eigen::VectorXd sample(Rng& rng) const override;
  Eigen::VectorXd neutral() const override;

  double sign(int square, int channel) const { return zeta_(square, channel); }
  double stripe(int channel, int col) const { return stripes_(channel, col); }

 private:
  int squares_;
  Eigen::ArrayXXd zeta_;     // squares x channels, entries +-eps
  Eigen::ArrayXXd stripes_;  // channels x width, entries +-eps
};

struct SpaceSpec {
  enum class Kind { Direct, LowRes, Pixel, Dct, Square };
  Kind kind = Kind::Direct;
  BudgetSpec budget;
  int h_low = 0, w_low = 0;  // LowRes
  int pixels = 1;            // Pixel
  int modes = 8;             // Dct
  int squares = 1;           // Square
};

// ctx_seed feeds the square context (signs, stripes); other kinds ignore it.
std::unique_ptr<AttackSpace> make_space(const SpaceSpec& spec, int c, int h, int w, uint64_t ctx_seed);

}  // namespace cbopt
