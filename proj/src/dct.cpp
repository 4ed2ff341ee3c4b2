#include "cbopt/dct.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cbopt {

Eigen::MatrixXd dct_matrix(int n) {
  if (n <= 0) throw std::invalid_argument("dct_matrix: n must be positive");
  Eigen::MatrixXd m(n, n);
  const double a0 = std::sqrt(1.0 / n);
  const double a = std::sqrt(2.0 / n);
  for (int u = 0; u < n; ++u)
    for (int x = 0; x < n; ++x)
      m(u, x) = (u == 0 ? a0 : a) * std::cos(std::numbers::pi * (2 * x + 1) * u / (2.0 * n));
  return m;
}

namespace {

ImageTensor transform(const ImageTensor& t, bool forward) {
  const Eigen::MatrixXd mh = dct_matrix(t.h);
  const Eigen::MatrixXd mw = dct_matrix(t.w);
  ImageTensor out(t.c, t.h, t.w);
  for (int ch = 0; ch < t.c; ++ch) {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(
        t.data.data() + static_cast<ptrdiff_t>(ch) * t.h * t.w, t.h, t.w);
    Eigen::MatrixXd y;
    if (forward)
      y = mh * x * mw.transpose();
    else
      y = mh.transpose() * x * mw;
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        out.data.data() + static_cast<ptrdiff_t>(ch) * t.h * t.w, t.h, t.w) = y;
  }
  return out;
}

}  // namespace

ImageTensor dct_forward(const ImageTensor& t) { return transform(t, true); }

ImageTensor dct_inverse(const ImageTensor& t) { return transform(t, false); }

ImageTensor dct_place(const Eigen::VectorXd& s, int m, int c, int h, int w) {
  if (m <= 0 || m > h || m > w) throw std::invalid_argument("dct_place: mode count out of range");
  if (s.size() != static_cast<Eigen::Index>(c) * m * m)
    throw std::invalid_argument("dct_place: coefficient vector has wrong length");
  ImageTensor out(c, h, w);
  for (int ch = 0; ch < c; ++ch)
    for (int u = 0; u < m; ++u)
      for (int v = 0; v < m; ++v)
        out.at(ch, u, v) = s[(static_cast<Eigen::Index>(ch) * m + u) * m + v];
  return out;
}

}  // namespace cbopt
