#pragma once

#include <Eigen/Dense>
#include <vector>

namespace cbopt {

struct PcaResult {
  Eigen::MatrixXd coords;     // L x 2: projections onto the top two components
  Eigen::VectorXd explained;  // sigma_i^2 / sum_j sigma_j^2, sums to 1
  Eigen::VectorXd residuals;  // per-point distance to the rank-2 reconstruction
};

// Principal components of an optimizer path: points are shifted so the final
// point is the origin, the SVD runs on the mean-centered cloud, and the
// shifted points are projected onto the top two directions. A constant path
// has no variance; its explained fractions are defined as [1, 0, ...].
// Requires at least 3 points.
PcaResult pca_trajectory(const std::vector<Eigen::VectorXd>& path);

}  // namespace cbopt
