#include "cbopt/projections.hpp"

#include <stdexcept>

namespace cbopt {

namespace {
void check(const Eigen::VectorXd& v, const Eigen::VectorXd& center, double eps, const char* who) {
  if (v.size() != center.size()) throw std::invalid_argument(std::string(who) + ": size mismatch");
  if (!(eps >= 0.0)) throw std::invalid_argument(std::string(who) + ": negative radius");
}
}  // namespace

Eigen::VectorXd project_linf(Eigen::VectorXd v, const Eigen::VectorXd& center, double eps) {
  check(v, center, eps, "project_linf");
  v = v.array().max(center.array() - eps).min(center.array() + eps);
  return v;
}

Eigen::VectorXd project_l2(Eigen::VectorXd v, const Eigen::VectorXd& center, double eps) {
  check(v, center, eps, "project_l2");
  const Eigen::VectorXd d = v - center;
  const double n = d.norm();
  if (n > eps) return center + d * (eps / n);
  return v;
}

Eigen::VectorXd tanh_reparam(const Eigen::VectorXd& w, const Eigen::VectorXd& center, double eps) {
  check(w, center, eps, "tanh_reparam");
  return center.array() + eps * w.array().tanh();
}

}  // namespace cbopt
