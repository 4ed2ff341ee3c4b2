#pragma once

#include <Eigen/Dense>

#include "cbopt/rng.hpp"

namespace cbopt {

// Feasible latent set an optimizer walks over: projection between steps and
// uniform sampling for ensemble / restart initialization.
class SearchDomain {
 public:
  virtual ~SearchDomain() = default;
  virtual int dim() const = 0;
  virtual void project(Eigen::VectorXd& v) const = 0;
  virtual Eigen::VectorXd sample(Rng& rng) const = 0;
  // Latent that leaves the attacked input untouched (box center for benches).
  virtual Eigen::VectorXd neutral() const = 0;
};

// Axis-aligned box, used by the analytic benchmark objectives.
class BoxDomain : public SearchDomain {
 public:
  BoxDomain(Eigen::VectorXd lo, Eigen::VectorXd hi);
  int dim() const override { return static_cast<int>(lo_.size()); }
  void project(Eigen::VectorXd& v) const override;
  Eigen::VectorXd sample(Rng& rng) const override;
  Eigen::VectorXd neutral() const override { return 0.5 * (lo_ + hi_); }

 private:
  Eigen::VectorXd lo_, hi_;
};

}  // namespace cbopt
