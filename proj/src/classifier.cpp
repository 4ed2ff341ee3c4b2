#include "cbopt/classifier.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "cbopt/rng.hpp"

namespace cbopt {

std::vector<Eigen::VectorXd> Classifier::logits_batch(const std::vector<Eigen::VectorXd>& inputs) const {
  std::vector<Eigen::VectorXd> out;
  out.reserve(inputs.size());
  for (const auto& x : inputs) out.push_back(logits(x));
  return out;
}

LinearClassifier::LinearClassifier(Eigen::MatrixXd weight, Eigen::VectorXd bias)
    : weight_(std::move(weight)), bias_(std::move(bias)) {
  if (weight_.rows() < 2) throw std::invalid_argument("LinearClassifier: need K >= 2");
  if (bias_.size() != weight_.rows()) throw std::invalid_argument("LinearClassifier: bias size mismatch");
  if (!weight_.allFinite() || !bias_.allFinite()) throw std::invalid_argument("LinearClassifier: non-finite weights");
}

Eigen::VectorXd LinearClassifier::logits(const Eigen::VectorXd& input) const {
  if (input.size() != weight_.cols()) throw std::invalid_argument("LinearClassifier: input dim mismatch");
  return weight_ * input + bias_;
}

LinearClassifier LinearClassifier::random(int dim, int classes, uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd w(classes, dim);
  for (int i = 0; i < classes; ++i)
    for (int j = 0; j < dim; ++j) w(i, j) = rng.normal();
  Eigen::VectorXd b(classes);
  for (int i = 0; i < classes; ++i) b[i] = 0.1 * rng.normal();
  return {std::move(w), std::move(b)};
}

TinyMlpClassifier::TinyMlpClassifier(Eigen::MatrixXd w1, Eigen::VectorXd b1, Eigen::MatrixXd w2,
                                     Eigen::VectorXd b2)
    : w1_(std::move(w1)), w2_(std::move(w2)), b1_(std::move(b1)), b2_(std::move(b2)) {
  if (w2_.rows() < 2) throw std::invalid_argument("TinyMlpClassifier: need K >= 2");
  if (b1_.size() != w1_.rows() || b2_.size() != w2_.rows() || w2_.cols() != w1_.rows())
    throw std::invalid_argument("TinyMlpClassifier: layer shape mismatch");
}

Eigen::VectorXd TinyMlpClassifier::logits(const Eigen::VectorXd& input) const {
  if (input.size() != w1_.cols()) throw std::invalid_argument("TinyMlpClassifier: input dim mismatch");
  const Eigen::VectorXd h = (w1_ * input + b1_).cwiseMax(0.0);
  return w2_ * h + b2_;
}

namespace {

std::vector<float> read_floats(std::ifstream& in, size_t count, const std::string& path) {
  std::vector<float> buf(count);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(count * sizeof(float)));
  if (in.gcount() != static_cast<std::streamsize>(count * sizeof(float)))
    throw std::runtime_error("truncated weights payload: " + path);
  return buf;
}

}  // namespace

std::unique_ptr<TinyMlpClassifier> load_tiny_mlp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open weights file: " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("missing weights header: " + path);
  nlohmann::json j = nlohmann::json::parse(header);
  const auto dims = j.at("dims");
  if (!dims.is_array() || dims.size() != 3) throw std::runtime_error("bad dims in weights file: " + path);
  const int d = dims[0].get<int>(), hidden = dims[1].get<int>(), k = dims[2].get<int>();
  if (d < 1 || hidden < 1 || k < 2) throw std::runtime_error("bad layer sizes in weights file: " + path);

  const size_t total = static_cast<size_t>(d) * hidden + hidden + static_cast<size_t>(hidden) * k + k;
  const std::vector<float> buf = read_floats(in, total, path);
  size_t off = 0;
  Eigen::MatrixXd w1(hidden, d);
  for (int i = 0; i < hidden; ++i)
    for (int jj = 0; jj < d; ++jj) w1(i, jj) = buf[off++];
  Eigen::VectorXd b1(hidden);
  for (int i = 0; i < hidden; ++i) b1[i] = buf[off++];
  Eigen::MatrixXd w2(k, hidden);
  for (int i = 0; i < k; ++i)
    for (int jj = 0; jj < hidden; ++jj) w2(i, jj) = buf[off++];
  Eigen::VectorXd b2(k);
  for (int i = 0; i < k; ++i) b2[i] = buf[off++];
  return std::make_unique<TinyMlpClassifier>(std::move(w1), std::move(b1), std::move(w2), std::move(b2));
}

void save_tiny_mlp(const std::string& path, const Eigen::MatrixXd& w1, const Eigen::VectorXd& b1,
                   const Eigen::MatrixXd& w2, const Eigen::VectorXd& b2) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write weights file: " + path);
  nlohmann::json j;
  j["dims"] = {static_cast<int>(w1.cols()), static_cast<int>(w1.rows()), static_cast<int>(w2.rows())};
  out << j.dump() << '\n';
  std::vector<float> buf;
  buf.reserve(static_cast<size_t>(w1.size() + b1.size() + w2.size() + b2.size()));
  for (int i = 0; i < w1.rows(); ++i)
    for (int jj = 0; jj < w1.cols(); ++jj) buf.push_back(static_cast<float>(w1(i, jj)));
  for (int i = 0; i < b1.size(); ++i) buf.push_back(static_cast<float>(b1[i]));
  for (int i = 0; i < w2.rows(); ++i)
    for (int jj = 0; jj < w2.cols(); ++jj) buf.push_back(static_cast<float>(w2(i, jj)));
  for (int i = 0; i < b2.size(); ++i) buf.push_back(static_cast<float>(b2[i]));
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!out) throw std::runtime_error("short write on weights file: " + path);
}

}  // namespace cbopt
