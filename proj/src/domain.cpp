#include "cbopt/domain.hpp"

#include <stdexcept>

namespace cbopt {

BoxDomain::BoxDomain(Eigen::VectorXd lo, Eigen::VectorXd hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size() || lo_.size() == 0) throw std::invalid_argument("BoxDomain: bad bounds");
  if ((lo_.array() > hi_.array()).any()) throw std::invalid_argument("BoxDomain: lo > hi");
}

void BoxDomain::project(Eigen::VectorXd& v) const {
  v = v.array().max(lo_.array()).min(hi_.array());
}

Eigen::VectorXd BoxDomain::sample(Rng& rng) const {
  Eigen::VectorXd v(lo_.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = lo_[i] + (hi_[i] - lo_[i]) * rng.uniform();
  return v;
}

}  // namespace cbopt
