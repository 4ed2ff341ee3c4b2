#pragma once

#include <Eigen/Dense>
#include <string>

namespace cbopt {

// Channel-major, row-major within a channel: index = (ch * h + row) * w + col.
// Values live in [0, 1] whenever the tensor represents an image handed to a
// classifier; intermediate perturbation buffers may leave that range.
struct ImageTensor {
  int c = 0;
  int h = 0;
  int w = 0;
  Eigen::ArrayXd data;

  ImageTensor() = default;
  ImageTensor(int c_, int h_, int w_) : c(c_), h(h_), w(w_), data(Eigen::ArrayXd::Zero(size())) {}

  int size() const { return c * h * w; }
  double& at(int ch, int y, int x) { return data[(ch * h + y) * w + x]; }
  double at(int ch, int y, int x) const { return data[(ch * h + y) * w + x]; }
};

// Componentwise clamp of pixel values into [0, 1].
ImageTensor clip01(ImageTensor t);

// File format: one UTF-8 JSON header line {"shape":[C,H,W]} terminated by
// '\n', followed by C*H*W little-endian float32 values in tensor order.
ImageTensor read_tensor(const std::string& path);
void write_tensor(const std::string& path, const ImageTensor& t);

}  // namespace cbopt
