#pragma once

#include <Eigen/Dense>

#include "cbopt/tensor.hpp"

namespace cbopt {

// Orthonormal DCT-II transform matrix: row u, column x holds
// a(u) * cos(pi * (2x + 1) * u / (2n)), a(0) = sqrt(1/n), a(u>0) = sqrt(2/n).
// The matrix is orthogonal, so the inverse transform is its transpose.
Eigen::MatrixXd dct_matrix(int n);

// Separable 2D transforms applied per channel.
ImageTensor dct_forward(const ImageTensor& t);
ImageTensor dct_inverse(const ImageTensor& t);

// Scatters a length c*m*m coefficient vector into the top-left m x m corner
// of each channel of a c x h x w coefficient tensor (zeros elsewhere).
// Layout of s: channel-major, then row-major over the m x m block.
ImageTensor dct_place(const Eigen::VectorXd& s, int m, int c, int h, int w);

}  // namespace cbopt
