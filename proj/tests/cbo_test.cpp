#include <doctest.h>

#include <cmath>

#include "cbopt/attack_space.hpp"
#include "cbopt/cbo.hpp"
#include "cbopt/classifier.hpp"
#include "cbopt/losses.hpp"
#include "cbopt/objective.hpp"

using namespace cbopt;

namespace {

class BigBox : public SearchDomain {
 public:
  explicit BigBox(int d, double r = 10.0) : d_(d), r_(r) {}
  int dim() const override { return d_; }
  void project(Eigen::VectorXd& v) const override { v = v.cwiseMax(-r_).cwiseMin(r_); }
  Eigen::VectorXd sample(Rng& rng) const override {
    Eigen::VectorXd v(d_);
    for (int i = 0; i < d_; ++i) v[i] = -r_ + 2.0 * r_ * rng.uniform();
    return v;
  }
  Eigen::VectorXd neutral() const override { return Eigen::VectorXd::Zero(d_); }

 private:
  int d_;
  double r_;
};

class ZeroNoise : public NoiseModel {
 public:
  Eigen::MatrixXd draw(const Eigen::MatrixXd& drift, double, Rng&) override {
    return Eigen::MatrixXd::Zero(drift.rows(), drift.cols());
  }
};

}  // namespace

TEST_CASE("cbo_step with tau*lambda = 1 and no noise collapses onto the consensus") {
  Eigen::MatrixXd particles(3, 2);
  particles << 1.0, 2.0, -1.0, 0.5, 4.0, -4.0;
  Eigen::VectorXd c(2);
  c << 0.25, -0.75;
  CboConfig config;
  config.tau = 1.0;
  config.lambda = 1.0;
  config.sigma = 0.0;
  ZeroNoise noise;
  BigBox domain(2);
  Rng rng(1);
  cbo_step(particles, c, config, noise, domain, rng);
  for (int i = 0; i < 3; ++i) {
    CHECK(particles(i, 0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(particles(i, 1) == doctest::Approx(-0.75).epsilon(1e-14));
  }
}

TEST_CASE("cbo_step drift example: overshoot past the consensus") {
  Eigen::MatrixXd particles(1, 2);
  particles << 1.0, 0.0;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(2);
  CboConfig config;
  config.tau = 1.3;
  config.lambda = 1.0;
  config.sigma = 0.0;
  ZeroNoise noise;
  BigBox domain(2);
  Rng rng(1);
  cbo_step(particles, c, config, noise, domain, rng);
  CHECK(particles(0, 0) == doctest::Approx(-0.3).epsilon(1e-12));
  CHECK(particles(0, 1) == 0.0);
}

TEST_CASE("cbo_step with lambda = 0 and no noise leaves particles fixed") {
  Eigen::MatrixXd particles(2, 2);
  particles << 1.0, 2.0, 3.0, 4.0;
  const Eigen::MatrixXd before = particles;
  Eigen::VectorXd c(2);
  c << -5.0, -5.0;
  CboConfig config;
  config.lambda = 0.0;
  config.sigma = 0.0;
  ZeroNoise noise;
  BigBox domain(2);
  Rng rng(1);
  cbo_step(particles, c, config, noise, domain, rng);
  CHECK((particles - before).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cbo_step projects every particle back into the domain") {
  Eigen::MatrixXd particles(2, 2);
  particles << 9.0, 9.0, -9.0, -9.0;
  Eigen::VectorXd c(2);
  c << 20.0, 20.0;  // pulls particles far outside the box
  CboConfig config;
  config.tau = 1.0;
  config.lambda = 1.0;
  config.sigma = 0.0;
  ZeroNoise noise;
  BigBox domain(2, 5.0);
  Rng rng(1);
  cbo_step(particles, c, config, noise, domain, rng);
  CHECK(particles.maxCoeff() <= 5.0);
  CHECK(particles.minCoeff() >= -5.0);
}

TEST_CASE("run_cbo converges on a quadratic across seeds") {
  // Regression: defaults (tau 1.3, lambda 1, sigma 1, 50 particles, batch 10,
  // ESS schedule) within 1e-2 of the minimizer on >= 18 of 20 seeds after at
  // most 300 iterations.
  Eigen::VectorXd target(10);
  for (int i = 0; i < 10; ++i) target[i] = 0.3 * (i % 3) - 0.2;
  int ok = 0;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    CboConfig config;
    config.seed = seed;
    BigBox domain(10, 3.0);
    BenchObjective obj(10, [&](const Eigen::VectorXd& x) { return 0.5 + (x - target).squaredNorm(); },
                       100000000);
    RunLimits limits;
    limits.max_iterations = 300;
    const RunRecord r = run_cbo(obj, domain, config, limits);
    REQUIRE(!r.trajectory.empty());
    if ((r.trajectory.back() - target).norm() < 1e-2) ++ok;
  }
  CHECK(ok >= 18);
}

TEST_CASE("an adversarial region inside the initial ensemble ends the run early") {
  CboConfig config;
  config.seed = 4;
  BigBox domain(3, 1.0);
  BenchObjective obj(3, [](const Eigen::VectorXd&) { return -1.0; }, 100000);
  const RunRecord r = run_cbo(obj, domain, config, RunLimits{});
  CHECK(r.success);
  CHECK(r.queries_used <= config.n_particles);
  CHECK(r.success_query == 1);
  CHECK(r.best_value == -1.0);
}

TEST_CASE("a zero budget yields no queries and no success") {
  CboConfig config;
  BigBox domain(3);
  BenchObjective obj(3, [](const Eigen::VectorXd&) { return -1.0; }, 0);
  const RunRecord r = run_cbo(obj, domain, config, RunLimits{});
  CHECK_FALSE(r.success);
  CHECK(r.queries_used == 0);
}

TEST_CASE("query accounting: initial full ensemble then one batch per iteration") {
  CboConfig config;
  config.n_particles = 20;
  config.batch_size = 5;
  config.seed = 9;
  BigBox domain(4);
  BenchObjective obj(4, [](const Eigen::VectorXd& x) { return 1.0 + x.squaredNorm(); }, 1000000);
  RunLimits limits;
  limits.max_iterations = 13;
  const RunRecord r = run_cbo(obj, domain, config, limits);
  CHECK_FALSE(r.success);
  CHECK(r.queries_used == 20 + 13 * 5);
  REQUIRE(r.per_iteration_queries.size() == 14);  // initial eval + 13 batches
  CHECK(r.per_iteration_queries[0].second == 20);
  for (std::size_t k = 1; k < r.per_iteration_queries.size(); ++k)
    CHECK(r.per_iteration_queries[k].second == 5);
}

TEST_CASE("budget exhaustion truncates the final batch and stops") {
  CboConfig config;
  config.n_particles = 10;
  config.batch_size = 4;
  config.seed = 2;
  BigBox domain(3);
  BenchObjective obj(3, [](const Eigen::VectorXd& x) { return 1.0 + x.squaredNorm(); }, 17);
  const RunRecord r = run_cbo(obj, domain, config, RunLimits{});
  CHECK_FALSE(r.success);
  CHECK(r.queries_used == 17);  // 10 + 4 + 3 (truncated)
}

TEST_CASE("runs are reproducible by seed") {
  auto once = [](uint64_t seed) {
    CboConfig config;
    config.seed = seed;
    config.n_particles = 12;
    config.batch_size = 3;
    BigBox domain(5, 2.0);
    BenchObjective obj(5, [](const Eigen::VectorXd& x) { return 1.0 + x.squaredNorm(); }, 400);
    RunLimits limits;
    limits.max_iterations = 40;
    return run_cbo(obj, domain, config, limits);
  };
  const RunRecord a = once(77), b = once(77), c = once(78);
  REQUIRE(a.trajectory.size() == b.trajectory.size());
  for (std::size_t k = 0; k < a.trajectory.size(); ++k)
    CHECK((a.trajectory[k] - b.trajectory[k]).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.queries_used == b.queries_used);
  bool same = c.trajectory.size() == a.trajectory.size();
  if (same)
    for (std::size_t k = 0; k < a.trajectory.size(); ++k)
      same = same && (a.trajectory[k] - c.trajectory[k]).cwiseAbs().maxCoeff() == 0.0;
  CHECK_FALSE(same);
}

TEST_CASE("fixed-alpha mode also descends") {
  CboConfig config;
  config.alpha_mode = CboConfig::AlphaMode::Fixed;
  config.alpha = 50.0;
  config.seed = 5;
  Eigen::VectorXd target = Eigen::VectorXd::Constant(6, 0.4);
  BigBox domain(6, 2.0);
  BenchObjective obj(6, [&](const Eigen::VectorXd& x) { return 0.5 + (x - target).squaredNorm(); },
                     100000000);
  RunLimits limits;
  limits.max_iterations = 200;
  const RunRecord r = run_cbo(obj, domain, config, limits);
  REQUIRE(!r.trajectory.empty());
  CHECK((r.trajectory.back() - target).norm() < 0.1);
}

TEST_CASE("structured noise kinds require an image-shaped space") {
  CboConfig config;
  config.noise = NoiseKind::DctBasis;
  BigBox domain(16);
  BenchObjective obj(16, [](const Eigen::VectorXd& x) { return 1.0 + x.squaredNorm(); }, 10000);
  CHECK_THROWS_AS(run_cbo(obj, domain, config, RunLimits{}), std::invalid_argument);

  // On a real image space the same config runs.
  const int c = 1, h = 4, w = 4;
  BudgetSpec budget{BudgetSpec::Norm::Linf, 0.5};
  DirectSpace space(c, h, w, budget);
  ImageTensor base(c, h, w);
  base.data.setConstant(0.5);
  LinearClassifier cls = LinearClassifier::random(16, 4, 7);
  LossSpec loss;
  loss.kind = LossSpec::Kind::UntargetedMargin;
  loss.label = argmax_label(cls.logits(base.data.matrix()));
  AttackObjective att(space, base, cls, loss, 500);
  CboConfig sq;
  sq.noise = NoiseKind::Square;
  sq.n_particles = 10;
  sq.batch_size = 5;
  RunLimits limits;
  limits.max_iterations = 30;
  const RunRecord r = run_cbo(att, space, sq, limits);
  CHECK(r.queries_used <= 500);
}

TEST_CASE("invalid configs are rejected") {
  BigBox domain(3);
  BenchObjective obj(3, [](const Eigen::VectorXd& x) { return x.squaredNorm(); }, 100);
  CboConfig bad_tau;
  bad_tau.tau = 0.0;
  CHECK_THROWS_AS(run_cbo(obj, domain, bad_tau, RunLimits{}), std::invalid_argument);
  CboConfig bad_batch;
  bad_batch.batch_size = 100;
  bad_batch.n_particles = 10;
  CHECK_THROWS_AS(run_cbo(obj, domain, bad_batch, RunLimits{}), std::invalid_argument);
}
