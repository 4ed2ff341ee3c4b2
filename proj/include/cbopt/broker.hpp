#pragma once

#include <vector>

#include "cbopt/classifier.hpp"
#include "cbopt/tensor.hpp"

namespace cbopt {

struct QueryLedger {
  long long budget = 0;
  long long used = 0;
  // (iteration index, queries spent during that iteration)
  std::vector<std::pair<long long, long long>> per_iteration_log;

  long long remaining() const { return budget - used; }
  void mark_iteration() {
    const long long prior = per_iteration_log.empty() ? 0 : marked_;
    per_iteration_log.emplace_back(static_cast<long long>(per_iteration_log.size()), used - prior);
    marked_ = used;
  }

 private:
  long long marked_ = 0;
};

struct BatchResult {
  std::vector<Eigen::VectorXd> logits;  // one entry per evaluated input
  bool exhausted = false;               // batch was truncated by the budget
};

// Evaluates inputs through the classifier, charging the ledger one query per
// evaluated input. A batch that would exceed the budget is truncated to the
// first remaining() inputs and flagged. Every input must be a valid image
// (entries in [0,1]); violations throw.
BatchResult query_batch(const Classifier& h, const std::vector<ImageTensor>& inputs, QueryLedger& ledger);

}  // namespace cbopt
