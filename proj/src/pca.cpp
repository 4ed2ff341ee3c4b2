#include "cbopt/pca.hpp"

#include <stdexcept>

namespace cbopt {

PcaResult pca_trajectory(const std::vector<Eigen::VectorXd>& path) {
  const Eigen::Index l = static_cast<Eigen::Index>(path.size());
  if (l < 3) throw std::invalid_argument("pca_trajectory: need at least 3 points");
  const Eigen::Index d = path[0].size();

  Eigen::MatrixXd shifted(d, l);
  for (Eigen::Index k = 0; k < l; ++k) {
    if (path[k].size() != d) throw std::invalid_argument("pca_trajectory: inconsistent dimensions");
    shifted.col(k) = path[k] - path[l - 1];
  }
  const Eigen::VectorXd mean = shifted.rowwise().mean();
  const Eigen::MatrixXd centered = shifted.colwise() - mean;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU);
  const Eigen::VectorXd sv = svd.singularValues();
  const Eigen::VectorXd var = sv.array().square();
  const double total = var.sum();

  PcaResult out;
  out.explained = Eigen::VectorXd::Zero(sv.size());
  if (total > 0) {
    out.explained = var / total;
  } else if (sv.size() > 0) {
    out.explained[0] = 1.0;
  }

  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(d, 2);
  const Eigen::Index rank = std::min<Eigen::Index>(2, svd.matrixU().cols());
  basis.leftCols(rank) = svd.matrixU().leftCols(rank);

  out.coords.resize(l, 2);
  out.residuals.resize(l);
  for (Eigen::Index k = 0; k < l; ++k) {
    const Eigen::Vector2d uv = basis.transpose() * shifted.col(k);
    out.coords.row(k) = uv.transpose();
    out.residuals[k] = (shifted.col(k) - basis * uv).norm();
  }
  return out;
}

}  // namespace cbopt
