#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

namespace cbopt {

// Closed-box classifier boundary: flat input vector in, raw logits out
// (losses are shift-invariant in logits, so no softmax here).
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual int input_dim() const = 0;
  virtual int num_classes() const = 0;
  virtual Eigen::VectorXd logits(const Eigen::VectorXd& input) const = 0;
  virtual std::vector<Eigen::VectorXd> logits_batch(const std::vector<Eigen::VectorXd>& inputs) const;
};

class LinearClassifier : public Classifier {
 public:
  LinearClassifier(Eigen::MatrixXd weight, Eigen::VectorXd bias);
  int input_dim() const override { return static_cast<int>(weight_.cols()); }
  int num_classes() const override { return static_cast<int>(weight_.rows()); }
  Eigen::VectorXd logits(const Eigen::VectorXd& input) const override;

  // Seeded random instance for demos and tests.
  static LinearClassifier random(int dim, int classes, uint64_t seed);

 private:
  Eigen::MatrixXd weight_;
  Eigen::VectorXd bias_;
};

// affine -> relu -> affine
class TinyMlpClassifier : public Classifier {
 public:
  TinyMlpClassifier(Eigen::MatrixXd w1, Eigen::VectorXd b1, Eigen::MatrixXd w2, Eigen::VectorXd b2);
  int input_dim() const override { return static_cast<int>(w1_.cols()); }
  int num_classes() const override { return static_cast<int>(w2_.rows()); }
  Eigen::VectorXd logits(const Eigen::VectorXd& input) const override;

 private:
  Eigen::MatrixXd w1_, w2_;
  Eigen::VectorXd b1_, b2_;
};

// Weights file: one JSON header line {"dims":[d, hidden, K]} then
// d*hidden + hidden + hidden*K + K little-endian float32 values, row-major,
// layer order W1 (hidden x d), b1, W2 (K x hidden), b2.
std::unique_ptr<TinyMlpClassifier> load_tiny_mlp(const std::string& path);
void save_tiny_mlp(const std::string& path, const Eigen::MatrixXd& w1, const Eigen::VectorXd& b1,
                   const Eigen::MatrixXd& w2, const Eigen::VectorXd& b2);

}  // namespace cbopt
