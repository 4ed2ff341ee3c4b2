#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cbopt/dct.hpp"
#include "cbopt/losses.hpp"
#include "cbopt/projections.hpp"
#include "cbopt/rng.hpp"
#include "cbopt/tensor.hpp"

using namespace cbopt;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

ImageTensor random_tensor(int c, int h, int w, Rng& rng) {
  ImageTensor t(c, h, w);
  for (int i = 0; i < t.size(); ++i) t.data[i] = rng.uniform();
  return t;
}

}  // namespace

TEST_CASE("rng streams are deterministic and seed-sensitive") {
  Rng a(42), b(42), c(43);
  bool diverged = false;
  for (int i = 0; i < 256; ++i) {
    const uint64_t va = a.next_u64();
    CHECK(va == b.next_u64());
    if (va != c.next_u64()) diverged = true;
  }
  CHECK(diverged);
}

TEST_CASE("rng uniform and below stay in range") {
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(rng.below(13) < 13);
  }
  CHECK(rng.below(1) == 0);
}

TEST_CASE("rng normal moments match a standard gaussian") {
  Rng rng(99);
  const int m = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < m; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / m;
  const double var = sq / m - mean * mean;
  // 4-sigma bands: se(mean) = 1/sqrt(m), se(var) ~ sqrt(2/m).
  CHECK(std::abs(mean) < 4.0 / std::sqrt(double(m)));
  CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / m));
}

TEST_CASE("derive_seed separates runs") {
  const uint64_t m = 123456;
  CHECK(derive_seed(m, 0, 0) != derive_seed(m, 0, 1));
  CHECK(derive_seed(m, 0, 0) != derive_seed(m, 1, 0));
  CHECK(derive_seed(m, 3, 5) == derive_seed(m, 3, 5));
  CHECK(derive_seed(m, 3, 5) != derive_seed(m + 1, 3, 5));
}

TEST_CASE("dct matrix is orthogonal") {
  for (int n : {2, 3, 8, 17}) {
    const Eigen::MatrixXd m = dct_matrix(n);
    const Eigen::MatrixXd gram = m * m.transpose();
    CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(dct_matrix(0), std::invalid_argument);
}

TEST_CASE("dct of a constant 2x2 image concentrates in the DC coefficient") {
  const double v = 0.35;
  ImageTensor t(1, 2, 2);
  t.data.setConstant(v);
  const ImageTensor f = dct_forward(t);
  CHECK(f.at(0, 0, 0) == doctest::Approx(2.0 * v).epsilon(1e-12));
  CHECK(std::abs(f.at(0, 0, 1)) < 1e-12);
  CHECK(std::abs(f.at(0, 1, 0)) < 1e-12);
  CHECK(std::abs(f.at(0, 1, 1)) < 1e-12);
}

TEST_CASE("dct round-trip and isometry") {
  Rng rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    ImageTensor t = random_tensor(3, 32, 32, rng);
    const ImageTensor back = dct_inverse(dct_forward(t));
    CHECK((back.data - t.data).abs().maxCoeff() < 1e-6);
    const ImageTensor f = dct_forward(t);
    const double a = std::sqrt((t.data * t.data).sum());
    const double b = std::sqrt((f.data * f.data).sum());
    CHECK(std::abs(a - b) < 1e-6);
  }
}

TEST_CASE("dct_place scatters coefficients into the low-frequency block") {
  Eigen::VectorXd s(2 * 2 * 2);
  for (int i = 0; i < s.size(); ++i) s[i] = i + 1;
  const ImageTensor t = dct_place(s, 2, 2, 4, 4);
  CHECK(t.at(0, 0, 0) == 1.0);
  CHECK(t.at(0, 0, 1) == 2.0);
  CHECK(t.at(0, 1, 0) == 3.0);
  CHECK(t.at(0, 1, 1) == 4.0);
  CHECK(t.at(1, 0, 0) == 5.0);
  CHECK(t.at(1, 1, 1) == 8.0);
  // Everything outside the m x m corner is zero.
  double outside = 0.0;
  for (int ch = 0; ch < 2; ++ch)
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x)
        if (y >= 2 || x >= 2) outside += std::abs(t.at(ch, y, x));
  CHECK(outside == 0.0);
  CHECK_THROWS_AS(dct_place(s, 3, 2, 4, 4), std::invalid_argument);
  CHECK_THROWS_AS(dct_place(s, 5, 2, 4, 4), std::invalid_argument);
}

TEST_CASE("clip01 clamps and is idempotent") {
  ImageTensor t(1, 1, 4);
  t.data << -0.5, 0.25, 1.0, 1.75;
  const ImageTensor c = clip01(t);
  CHECK(c.data[0] == 0.0);
  CHECK(c.data[1] == 0.25);
  CHECK(c.data[2] == 1.0);
  CHECK(c.data[3] == 1.0);
  const ImageTensor cc = clip01(c);
  CHECK((cc.data == c.data).all());
}

TEST_CASE("tensor file round-trip preserves float32 values") {
  Rng rng(11);
  ImageTensor t(3, 5, 7);
  for (int i = 0; i < t.size(); ++i) t.data[i] = static_cast<float>(rng.uniform());
  const std::string path = temp_path("cbopt_tensor_rt.tensor");
  write_tensor(path, t);
  const ImageTensor r = read_tensor(path);
  CHECK(r.c == 3);
  CHECK(r.h == 5);
  CHECK(r.w == 7);
  CHECK((r.data == t.data).all());
  std::remove(path.c_str());
}

TEST_CASE("tensor reader rejects malformed files") {
  const std::string path = temp_path("cbopt_tensor_bad.tensor");
  {
    std::ofstream f(path, std::ios::binary);
    f << "{\"shape\":[1,2,2]}\n";
    const float one = 1.0f;
    f.write(reinterpret_cast<const char*>(&one), sizeof(one));  // 1 of 4 values
  }
  CHECK_THROWS(read_tensor(path));
  {
    std::ofstream f(path, std::ios::binary);
    f << "not json\n";
  }
  CHECK_THROWS(read_tensor(path));
  CHECK_THROWS(read_tensor(temp_path("cbopt_missing_file.tensor")));
  std::remove(path.c_str());
}

TEST_CASE("project_linf clamps componentwise and exactly") {
  Eigen::VectorXd c(3);
  c << 0.0, 1.0, -1.0;
  Eigen::VectorXd v(3);
  v << 0.3, 1.5, -1.05;
  const Eigen::VectorXd p = project_linf(v, c, 0.1);
  CHECK(p[0] == 0.1);
  CHECK(p[1] == 1.1);
  CHECK(p[2] == -1.05);
  // Already feasible points are untouched.
  CHECK((project_linf(p, c, 0.1) - p).norm() == 0.0);
}

TEST_CASE("project_l2 rescales radially") {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(4);
  Eigen::VectorXd v(4);
  v << 3.0, 0.0, 4.0, 0.0;  // norm 5
  const Eigen::VectorXd p = project_l2(v, c, 1.0);
  CHECK(p.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(p[2] == doctest::Approx(0.8).epsilon(1e-12));
  Eigen::VectorXd inside(4);
  inside << 0.1, 0.0, 0.0, 0.0;
  CHECK((project_l2(inside, c, 1.0) - inside).norm() == 0.0);
}

TEST_CASE("tanh_reparam maps zero to center and stays inside the box") {
  Eigen::VectorXd c(3);
  c << 0.2, 0.5, 0.8;
  const Eigen::VectorXd at0 = tanh_reparam(Eigen::VectorXd::Zero(3), c, 0.1);
  CHECK((at0 - c).norm() == 0.0);
  Eigen::VectorXd w(3);
  w << 50.0, -50.0, 0.3;
  const Eigen::VectorXd p = tanh_reparam(w, c, 0.1);
  CHECK((p - c).cwiseAbs().maxCoeff() <= 0.1 + 1e-15);
  CHECK(p[0] == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(p[1] == doctest::Approx(0.4).epsilon(1e-9));
}

TEST_CASE("argmax ties resolve to the lowest index") {
  Eigen::VectorXd y(4);
  y << 1.0, 3.0, 3.0, 0.5;
  CHECK(argmax_label(y) == 1);
}

TEST_CASE("margin loss sign encodes classification") {
  Eigen::VectorXd y(3);
  y << 2.0, 1.0, 0.0;
  CHECK(margin_loss(y, 0) == doctest::Approx(1.0));   // correct -> positive
  CHECK(margin_loss(y, 1) == doctest::Approx(-1.0));  // wrong -> negative
  CHECK(margin_loss(y, 0, true) == doctest::Approx(-1.0));
  // Logit shift invariance.
  Eigen::VectorXd shifted = y.array() + 17.0;
  CHECK(margin_loss(shifted, 0) == doctest::Approx(margin_loss(y, 0)));
}

TEST_CASE("targeted cross-entropy is nonnegative and minimized at the target") {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(4);
  CHECK(targeted_ce_loss(y, 2) == doctest::Approx(std::log(4.0)));
  Eigen::VectorXd peaked(4);
  peaked << 0.0, 0.0, 30.0, 0.0;
  CHECK(targeted_ce_loss(peaked, 2) < 1e-9);
  CHECK(targeted_ce_loss(peaked, 2) >= 0.0);
  CHECK(targeted_ce_loss(peaked, 0) > 1.0);
}

TEST_CASE("shifted loss fires only when the target wins") {
  LossSpec spec;
  spec.kind = LossSpec::Kind::TargetedCe;
  spec.target = 2;
  spec.shift = 10.0;
  Eigen::VectorXd win(4);
  win << 0.0, 0.0, 5.0, 0.0;
  Eigen::VectorXd lose(4);
  lose << 5.0, 0.0, 0.0, 0.0;
  const double fw = targeted_ce_loss(win, 2);
  const double fl = targeted_ce_loss(lose, 2);
  CHECK(shifted_loss(fw, win, spec) == doctest::Approx(fw - 10.0));
  CHECK(shifted_loss(fw, win, spec) < 0.0);
  CHECK(shifted_loss(fl, lose, spec) == doctest::Approx(fl));
  CHECK(shifted_loss(fl, lose, spec) >= 0.0);
  CHECK(attack_loss(win, spec) == doctest::Approx(fw - 10.0));

  LossSpec um;
  um.kind = LossSpec::Kind::UntargetedMargin;
  um.label = 0;
  CHECK(shifted_loss(margin_loss(lose, 0), lose, um) == doctest::Approx(margin_loss(lose, 0)));
  CHECK(attack_loss(lose, um) == doctest::Approx(5.0));
  CHECK(attack_loss(win, um) == doctest::Approx(-5.0));
}
