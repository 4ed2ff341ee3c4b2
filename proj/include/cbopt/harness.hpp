#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cbopt/cbo.hpp"
#include "cbopt/es.hpp"
#include "cbopt/estimators.hpp"
#include "cbopt/ndjson.hpp"
#include "cbopt/objective.hpp"

namespace cbopt {

struct ClassifierSpec {
  enum class Kind { Linear, TinyMlp, Remote };
  Kind kind = Kind::Linear;
  int dim = 16;       // Linear
  int classes = 4;    // Linear, Remote
  uint64_t seed = 7;  // Linear: seeded random weights
  std::string path;   // TinyMlp weights file
  std::string endpoint;  // Remote host:port
  bool probabilities = false;  // Remote emits probabilities -> take log
};

std::unique_ptr<Classifier> make_classifier(const ClassifierSpec& spec, int input_dim);

struct DatasetItem {
  std::string path;  // image tensor file
  int label = 0;
};

struct ExperimentConfig {
  enum class Optimizer { Cbo, Ch, Nes, OnePlusLambda, CauchyOnePlusOne };
  Optimizer optimizer = Optimizer::Cbo;

  CboConfig cbo;
  ChNesConfig ch_nes;
  double ch_alpha = 10.0;  // CH inverse temperature
  EsConfig es;

  SpaceSpec space;

  LossSpec::Kind loss_kind = LossSpec::Kind::UntargetedMargin;
  int target = -1;       // targeted campaigns: fixed target label
  double shift = 10.0;

  long long query_budget = 10000;     // total Q per input
  std::vector<long long> restarts;    // per-restart budgets; empty = one run of Q
  long long max_iterations = 1000000;

  std::vector<DatasetItem> dataset;
  ClassifierSpec classifier;
  uint64_t seed = 1;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

// Per test-point outcome of a campaign.
struct CampaignRun {
  int input_index = -1;
  bool attacked = false;  // initially misclassified points are skipped
  bool success = false;
  long long queries_to_success = -1;  // cumulative query index across restarts
  long long queries_used = 0;         // actual queries spent across restarts
  double l2_distortion = std::numeric_limits<double>::quiet_NaN();
  bool robust = true;       // final output still classified as the true label
  RunRecord last;           // record of the final restart (trajectory, best point)
  ImageTensor adversarial;  // realized attack output (empty when skipped)
};

// Aggregates per the bracket convention: query statistics on successful runs
// only; avg_queries_all charges the full budget Q to every failed run. NaN
// marks statistics with an empty support (exported as JSON null).
struct CampaignStats {
  int n_inputs = 0;
  int n_attacked = 0;
  int n_success = 0;
  int n_skipped = 0;
  double failure_rate = std::numeric_limits<double>::quiet_NaN();
  double avg_queries_success = std::numeric_limits<double>::quiet_NaN();
  double avg_queries_all = std::numeric_limits<double>::quiet_NaN();
  double median_queries_success = std::numeric_limits<double>::quiet_NaN();
  double avg_l2 = std::numeric_limits<double>::quiet_NaN();
  double robust_accuracy = std::numeric_limits<double>::quiet_NaN();
};

struct CampaignInput {
  ImageTensor image;
  int label = 0;
};

struct CampaignResult {
  CampaignStats stats;
  std::vector<CampaignRun> runs;
  long long total_budget = 0;  // Q, for histogram axes and failure charging
  bool aborted = false;        // classifier became unreachable mid-campaign
  std::string abort_reason;
};

// One optimizer run, dispatched by config.optimizer with the given seed.
RunRecord run_attack(const ExperimentConfig& config, Objective& objective, const SearchDomain& domain,
                     uint64_t run_seed);

// Attacks every initially-correctly-classified input, walking the restart
// schedule until success; restarts are independent (fresh seed and state).
// Per-run seeds derive deterministically from the master seed and the input
// and restart indices.
CampaignResult run_campaign(const ExperimentConfig& config, const Classifier& h,
                            const std::vector<CampaignInput>& dataset);
// Loads the dataset from config.dataset paths and builds the classifier.
CampaignResult run_campaign(const ExperimentConfig& config);

// Fraction of test points whose attacked output keeps the true label;
// initially misclassified points count as non-robust.
double robust_accuracy(const std::vector<CampaignRun>& runs);

}  // namespace cbopt
