#pragma once

#include <Eigen/Dense>

namespace cbopt {

// Componentwise clamp of v into the L-inf ball of radius eps around center.
Eigen::VectorXd project_linf(Eigen::VectorXd v, const Eigen::VectorXd& center, double eps);

// Radial rescale of v onto the L2 ball of radius eps around center
// (identity when already inside).
Eigen::VectorXd project_l2(Eigen::VectorXd v, const Eigen::VectorXd& center, double eps);

// Smooth box reparameterization: center + eps * tanh(w), componentwise.
// Bounds are approached asymptotically; w = 0 maps to the center.
Eigen::VectorXd tanh_reparam(const Eigen::VectorXd& w, const Eigen::VectorXd& center, double eps);

}  // namespace cbopt
