#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "cbopt/attack_space.hpp"
#include "cbopt/broker.hpp"
#include "cbopt/classifier.hpp"
#include "cbopt/losses.hpp"

namespace cbopt {

// Outcome of one optimizer run against a query-counted objective.
struct RunRecord {
  bool success = false;
  long long queries_used = 0;
  // 1-based index of the query at which the first adversarial point was
  // evaluated; -1 when the run never succeeded. Attribution is per query,
  // not per iteration: a success inside a batch is dated to its own query.
  long long success_query = -1;
  Eigen::VectorXd best_point;
  double best_value = std::numeric_limits<double>::infinity();
  // Per-iteration path: consensus points for the ensemble scheme, iterates
  // for the single-point schemes.
  std::vector<Eigen::VectorXd> trajectory;
  std::vector<std::pair<long long, long long>> per_iteration_queries;
};

struct RunLimits {
  long long max_iterations = 1000;
};

// A scalar objective the optimizers minimize, metered by a QueryLedger.
// eval_batch charges one query per evaluated point, truncating any batch that
// would exceed the budget (callers detect truncation by the returned size).
// Every evaluation feeds the success/best bookkeeping: a value < 0 marks the
// run successful at that query index.
class Objective {
 public:
  explicit Objective(long long budget) { ledger_.budget = budget; }
  virtual ~Objective() = default;

  virtual int dim() const = 0;
  virtual std::vector<double> eval_batch(const std::vector<Eigen::VectorXd>& points) = 0;

  // Single-point convenience; nullopt when the budget is exhausted.
  std::optional<double> eval(const Eigen::VectorXd& point);

  QueryLedger& ledger() { return ledger_; }
  const QueryLedger& ledger() const { return ledger_; }
  bool exhausted() const { return ledger_.remaining() <= 0; }

  bool success() const { return success_query_ >= 0; }
  long long success_query() const { return success_query_; }
  bool has_best() const { return best_value_ < std::numeric_limits<double>::infinity(); }
  const Eigen::VectorXd& best_point() const { return best_point_; }
  double best_value() const { return best_value_; }

  // Snapshot of the bookkeeping; optimizers append their trajectory.
  RunRecord make_record() const;

 protected:
  // One evaluated point, dated by its 1-based global query index.
  void record(const Eigen::VectorXd& point, double value, long long query_index);

  QueryLedger ledger_;

 private:
  long long success_query_ = -1;
  Eigen::VectorXd best_point_;
  double best_value_ = std::numeric_limits<double>::infinity();
};

// Analytic test function behind the same metering interface.
class BenchObjective : public Objective {
 public:
  BenchObjective(int dim, std::function<double(const Eigen::VectorXd&)> f, long long budget);
  int dim() const override { return dim_; }
  std::vector<double> eval_batch(const std::vector<Eigen::VectorXd>& points) override;

 private:
  int dim_;
  std::function<double(const Eigen::VectorXd&)> f_;
};

// The adversarial objective: latent -> apply -> budget post-processing ->
// classifier query -> shifted loss. Every queried image is forced onto the
// budget ball around the base image and into [0,1] before it reaches the
// classifier, so the feasibility invariants hold for arbitrary latents.
class AttackObjective : public Objective {
 public:
  AttackObjective(const AttackSpace& space, ImageTensor base, const Classifier& h, LossSpec loss,
                  long long budget);

  int dim() const override { return space_.dim(); }
  std::vector<double> eval_batch(const std::vector<Eigen::VectorXd>& points) override;

  // The exact image a latent would be queried at (no ledger charge).
  ImageTensor realize(const Eigen::VectorXd& s) const;
  const ImageTensor& base() const { return base_; }
  const AttackSpace& space() const { return space_; }
  const LossSpec& loss() const { return loss_; }

 private:
  const AttackSpace& space_;
  ImageTensor base_;
  const Classifier& h_;
  LossSpec loss_;
};

}  // namespace cbopt
