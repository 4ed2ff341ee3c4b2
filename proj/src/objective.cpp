#include "cbopt/objective.hpp"

#include <stdexcept>

namespace cbopt {

std::optional<double> Objective::eval(const Eigen::VectorXd& point) {
  std::vector<double> v = eval_batch({point});
  if (v.empty()) return std::nullopt;
  return v[0];
}

void Objective::record(const Eigen::VectorXd& point, double value, long long query_index) {
  if (value < best_value_) {
    best_value_ = value;
    best_point_ = point;
  }
  if (value < 0.0 && success_query_ < 0) success_query_ = query_index;
}

RunRecord Objective::make_record() const {
  RunRecord r;
  r.success = success();
  r.queries_used = ledger_.used;
  r.success_query = success_query_;
  if (has_best()) {
    r.best_point = best_point_;
    r.best_value = best_value_;
  }
  r.per_iteration_queries = ledger_.per_iteration_log;
  return r;
}

BenchObjective::BenchObjective(int dim, std::function<double(const Eigen::VectorXd&)> f, long long budget)
    : Objective(budget), dim_(dim), f_(std::move(f)) {}

std::vector<double> BenchObjective::eval_batch(const std::vector<Eigen::VectorXd>& points) {
  long long room = ledger_.remaining();
  if (room < 0) room = 0;
  const std::size_t take = std::min(points.size(), static_cast<std::size_t>(room));
  std::vector<double> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    const double v = f_(points[i]);
    ++ledger_.used;
    record(points[i], v, ledger_.used);
    out.push_back(v);
  }
  return out;
}

AttackObjective::AttackObjective(const AttackSpace& space, ImageTensor base, const Classifier& h,
                                 LossSpec loss, long long budget)
    : Objective(budget), space_(space), base_(std::move(base)), h_(h), loss_(loss) {
  if (h_.input_dim() != base_.size()) {
    throw std::invalid_argument("AttackObjective: classifier input_dim != image size");
  }
}

ImageTensor AttackObjective::realize(const Eigen::VectorXd& s) const {
  // Estimator probes are deliberately not projected by the optimizers, so the
  // latent is pulled into the space's domain here before application.
  Eigen::VectorXd feasible = s;
  space_.project(feasible);
  ImageTensor img = space_.apply(feasible, base_);
  return enforce_budget(std::move(img), base_, space_.budget());
}

std::vector<double> AttackObjective::eval_batch(const std::vector<Eigen::VectorXd>& points) {
  std::vector<ImageTensor> imgs;
  imgs.reserve(points.size());
  for (const Eigen::VectorXd& s : points) {
    ImageTensor img = realize(s);
    const double dist = budget_distance(img, base_, space_.budget().norm);
    const double slack = space_.budget().norm == BudgetSpec::Norm::Linf ? 0.0 : 1e-9;
    if (dist > space_.budget().eps + slack) {
      throw std::logic_error("AttackObjective: realized image violates the budget");
    }
    imgs.push_back(std::move(img));
  }
  const long long before = ledger_.used;
  BatchResult br = query_batch(h_, imgs, ledger_);
  std::vector<double> out;
  out.reserve(br.logits.size());
  for (std::size_t i = 0; i < br.logits.size(); ++i) {
    const double v = attack_loss(br.logits[i], loss_);
    record(points[i], v, before + static_cast<long long>(i) + 1);
    out.push_back(v);
  }
  return out;
}

}  // namespace cbopt
