#include "cbopt/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cbopt {

using nlohmann::json;

std::unique_ptr<Classifier> make_classifier(const ClassifierSpec& spec, int input_dim) {
  switch (spec.kind) {
    case ClassifierSpec::Kind::Linear: {
      const int d = spec.dim > 0 ? spec.dim : input_dim;
      return std::make_unique<LinearClassifier>(LinearClassifier::random(d, spec.classes, spec.seed));
    }
    case ClassifierSpec::Kind::TinyMlp:
      return load_tiny_mlp(spec.path);
    case ClassifierSpec::Kind::Remote:
      return std::make_unique<RemoteClassifier>(parse_endpoint(spec.endpoint), input_dim, spec.classes,
                                                spec.probabilities);
  }
  throw std::invalid_argument("make_classifier: unknown kind");
}

namespace {

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

NoiseKind parse_noise_kind(const std::string& s) {
  if (s == "anisotropic") return NoiseKind::GaussianAnisotropic;
  if (s == "isotropic") return NoiseKind::GaussianIsotropic;
  if (s == "dct") return NoiseKind::DctBasis;
  if (s == "square") return NoiseKind::Square;
  throw std::invalid_argument("unknown noise kind '" + s + "'");
}

SpaceSpec::Kind parse_space_kind(const std::string& s) {
  if (s == "direct") return SpaceSpec::Kind::Direct;
  if (s == "lowres") return SpaceSpec::Kind::LowRes;
  if (s == "pixel") return SpaceSpec::Kind::Pixel;
  if (s == "dct") return SpaceSpec::Kind::Dct;
  if (s == "square") return SpaceSpec::Kind::Square;
  throw std::invalid_argument("unknown space kind '" + s + "'");
}

ExperimentConfig::Optimizer parse_optimizer(const std::string& s) {
  if (s == "cbo") return ExperimentConfig::Optimizer::Cbo;
  if (s == "ch") return ExperimentConfig::Optimizer::Ch;
  if (s == "nes") return ExperimentConfig::Optimizer::Nes;
  if (s == "one_plus_lambda" || s == "simba") return ExperimentConfig::Optimizer::OnePlusLambda;
  if (s == "cauchy_es") return ExperimentConfig::Optimizer::CauchyOnePlusOne;
  throw std::invalid_argument("unknown optimizer '" + s + "'");
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j = json::parse(json_text);
  ExperimentConfig cfg;

  cfg.seed = get_or<uint64_t>(j, "seed", cfg.seed);
  if (j.contains("optimizer")) cfg.optimizer = parse_optimizer(j.at("optimizer").get<std::string>());
  cfg.max_iterations = get_or<long long>(j, "max_iterations", cfg.max_iterations);

  if (j.contains("budget")) {
    const json& b = j.at("budget");
    cfg.query_budget = get_or<long long>(b, "queries", cfg.query_budget);
    if (b.contains("restarts")) cfg.restarts = b.at("restarts").get<std::vector<long long>>();
  }

  if (j.contains("space")) {
    const json& s = j.at("space");
    if (s.contains("kind")) cfg.space.kind = parse_space_kind(s.at("kind").get<std::string>());
    const std::string norm = get_or<std::string>(s, "norm", "linf");
    if (norm == "linf") {
      cfg.space.budget.norm = BudgetSpec::Norm::Linf;
    } else if (norm == "l2") {
      cfg.space.budget.norm = BudgetSpec::Norm::L2;
    } else {
      throw std::invalid_argument("unknown budget norm '" + norm + "'");
    }
    cfg.space.budget.eps = get_or<double>(s, "epsilon", cfg.space.budget.eps);
    cfg.space.h_low = get_or<int>(s, "h_low", cfg.space.h_low);
    cfg.space.w_low = get_or<int>(s, "w_low", cfg.space.w_low);
    cfg.space.pixels = get_or<int>(s, "pixels", cfg.space.pixels);
    cfg.space.modes = get_or<int>(s, "modes", cfg.space.modes);
    cfg.space.squares = get_or<int>(s, "squares", cfg.space.squares);
  }

  if (j.contains("loss")) {
    const json& l = j.at("loss");
    const std::string kind = get_or<std::string>(l, "kind", "margin");
    if (kind == "margin") {
      cfg.loss_kind = LossSpec::Kind::UntargetedMargin;
    } else if (kind == "targeted_ce") {
      cfg.loss_kind = LossSpec::Kind::TargetedCe;
    } else {
      throw std::invalid_argument("unknown loss kind '" + kind + "'");
    }
    cfg.target = get_or<int>(l, "target", cfg.target);
    cfg.shift = get_or<double>(l, "shift", cfg.shift);
  }

  if (j.contains("classifier")) {
    const json& c = j.at("classifier");
    const std::string kind = get_or<std::string>(c, "kind", "linear");
    if (kind == "linear") {
      cfg.classifier.kind = ClassifierSpec::Kind::Linear;
    } else if (kind == "tiny_mlp") {
      cfg.classifier.kind = ClassifierSpec::Kind::TinyMlp;
    } else if (kind == "remote") {
      cfg.classifier.kind = ClassifierSpec::Kind::Remote;
    } else {
      throw std::invalid_argument("unknown classifier kind '" + kind + "'");
    }
    cfg.classifier.dim = get_or<int>(c, "dim", cfg.classifier.dim);
    cfg.classifier.classes = get_or<int>(c, "classes", cfg.classifier.classes);
    cfg.classifier.seed = get_or<uint64_t>(c, "seed", cfg.classifier.seed);
    cfg.classifier.path = get_or<std::string>(c, "path", cfg.classifier.path);
    cfg.classifier.endpoint = get_or<std::string>(c, "endpoint", cfg.classifier.endpoint);
    cfg.classifier.probabilities = get_or<bool>(c, "probabilities", cfg.classifier.probabilities);
  }

  if (j.contains("dataset")) {
    for (const json& item : j.at("dataset")) {
      cfg.dataset.push_back({item.at("path").get<std::string>(), item.at("label").get<int>()});
    }
  }

  if (j.contains("cbo")) {
    const json& c = j.at("cbo");
    cfg.cbo.tau = get_or<double>(c, "tau", cfg.cbo.tau);
    cfg.cbo.lambda = get_or<double>(c, "lambda", cfg.cbo.lambda);
    cfg.cbo.sigma = get_or<double>(c, "sigma", cfg.cbo.sigma);
    cfg.cbo.n_particles = get_or<int>(c, "particles", cfg.cbo.n_particles);
    cfg.cbo.batch_size = get_or<int>(c, "batch", cfg.cbo.batch_size);
    const std::string mode = get_or<std::string>(c, "alpha_mode", "ess");
    if (mode == "ess") {
      cfg.cbo.alpha_mode = CboConfig::AlphaMode::EssScheduled;
    } else if (mode == "fixed") {
      cfg.cbo.alpha_mode = CboConfig::AlphaMode::Fixed;
    } else {
      throw std::invalid_argument("unknown alpha_mode '" + mode + "'");
    }
    cfg.cbo.alpha = get_or<double>(c, "alpha", cfg.cbo.alpha);
    cfg.cbo.eta_ess = get_or<double>(c, "eta_ess", cfg.cbo.eta_ess);
    if (c.contains("noise")) cfg.cbo.noise = parse_noise_kind(c.at("noise").get<std::string>());
  }

  if (j.contains("ch_nes")) {
    const json& c = j.at("ch_nes");
    cfg.ch_nes.sigma = get_or<double>(c, "sigma", cfg.ch_nes.sigma);
    cfg.ch_nes.eta = get_or<double>(c, "eta", cfg.ch_nes.eta);
    cfg.ch_nes.n_samples = get_or<int>(c, "samples", cfg.ch_nes.n_samples);
    cfg.ch_nes.momentum = get_or<double>(c, "momentum", cfg.ch_nes.momentum);
    const std::string sched = get_or<std::string>(c, "schedule", "plateau");
    if (sched == "plateau") {
      cfg.ch_nes.schedule = ChNesConfig::Schedule::PlateauDecay;
    } else if (sched == "constant") {
      cfg.ch_nes.schedule = ChNesConfig::Schedule::Constant;
    } else {
      throw std::invalid_argument("unknown schedule '" + sched + "'");
    }
    cfg.ch_nes.patience = get_or<int>(c, "patience", cfg.ch_nes.patience);
    cfg.ch_nes.decay_factor = get_or<double>(c, "decay", cfg.ch_nes.decay_factor);
    cfg.ch_alpha = get_or<double>(c, "alpha", cfg.ch_alpha);
  }

  if (j.contains("es")) {
    const json& e = j.at("es");
    cfg.es.tau_mut = get_or<double>(e, "tau_mut", cfg.es.tau_mut);
    cfg.es.lambda_cand = get_or<int>(e, "lambda", cfg.es.lambda_cand);
    const std::string noise = get_or<std::string>(e, "noise", "gaussian");
    if (noise == "gaussian") {
      cfg.es.noise = EsConfig::Noise::Gaussian;
    } else if (noise == "cauchy") {
      cfg.es.noise = EsConfig::Noise::Cauchy;
    } else if (noise == "axis") {
      cfg.es.noise = EsConfig::Noise::BasisAxis;
    } else {
      throw std::invalid_argument("unknown es noise '" + noise + "'");
    }
    cfg.es.simba_rule = get_or<bool>(e, "simba", cfg.es.simba_rule);
  }

  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

RunRecord run_attack(const ExperimentConfig& config, Objective& objective, const SearchDomain& domain,
                     uint64_t run_seed) {
  const RunLimits limits{config.max_iterations};
  switch (config.optimizer) {
    case ExperimentConfig::Optimizer::Cbo: {
      CboConfig c = config.cbo;
      c.seed = run_seed;
      return run_cbo(objective, domain, c, limits);
    }
    case ExperimentConfig::Optimizer::Ch: {
      ChNesConfig c = config.ch_nes;
      c.seed = run_seed;
      return run_ch_nes(objective, domain, c, {EstimatorKind::Variant::Ch, config.ch_alpha}, limits);
    }
    case ExperimentConfig::Optimizer::Nes: {
      ChNesConfig c = config.ch_nes;
      c.seed = run_seed;
      return run_ch_nes(objective, domain, c, {EstimatorKind::Variant::Nes, config.ch_alpha}, limits);
    }
    case ExperimentConfig::Optimizer::OnePlusLambda: {
      EsConfig e = config.es;
      e.seed = run_seed;
      return run_one_plus_lambda(objective, domain, e, limits);
    }
    case ExperimentConfig::Optimizer::CauchyOnePlusOne: {
      EsConfig e = config.es;
      e.seed = run_seed;
      return run_cauchy_es(objective, domain, e, limits);
    }
  }
  throw std::invalid_argument("run_attack: unknown optimizer");
}

namespace {

std::vector<long long> restart_schedule(const ExperimentConfig& config) {
  if (config.restarts.empty()) return {config.query_budget};
  const long long total = std::accumulate(config.restarts.begin(), config.restarts.end(), 0LL);
  if (total != config.query_budget) {
    throw std::invalid_argument("restart budgets must sum to the total query budget");
  }
  return config.restarts;
}

CampaignStats aggregate_stats(const std::vector<CampaignRun>& runs, long long q) {
  CampaignStats s;
  s.n_inputs = static_cast<int>(runs.size());
  std::vector<double> success_queries;
  std::vector<double> success_l2;
  double all_sum = 0.0;
  for (const CampaignRun& r : runs) {
    if (!r.attacked) {
      ++s.n_skipped;
      continue;
    }
    ++s.n_attacked;
    if (r.success) {
      ++s.n_success;
      success_queries.push_back(static_cast<double>(r.queries_to_success));
      if (std::isfinite(r.l2_distortion)) success_l2.push_back(r.l2_distortion);
      all_sum += static_cast<double>(r.queries_to_success);
    } else {
      all_sum += static_cast<double>(q);
    }
  }
  if (s.n_attacked > 0) {
    s.failure_rate = 1.0 - static_cast<double>(s.n_success) / s.n_attacked;
    s.avg_queries_all = all_sum / s.n_attacked;
  }
  if (!success_queries.empty()) {
    const auto n = success_queries.size();
    s.avg_queries_success = std::accumulate(success_queries.begin(), success_queries.end(), 0.0) / n;
    std::sort(success_queries.begin(), success_queries.end());
    s.median_queries_success = n % 2 == 1 ? success_queries[n / 2]
                                          : 0.5 * (success_queries[n / 2 - 1] + success_queries[n / 2]);
  }
  if (!success_l2.empty()) {
    s.avg_l2 = std::accumulate(success_l2.begin(), success_l2.end(), 0.0) / success_l2.size();
  }
  s.robust_accuracy = robust_accuracy(runs);
  return s;
}

}  // namespace

double robust_accuracy(const std::vector<CampaignRun>& runs) {
  if (runs.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto robust = std::count_if(runs.begin(), runs.end(), [](const CampaignRun& r) { return r.robust; });
  return static_cast<double>(robust) / static_cast<double>(runs.size());
}

CampaignResult run_campaign(const ExperimentConfig& config, const Classifier& h,
                            const std::vector<CampaignInput>& dataset) {
  if (dataset.empty()) throw std::invalid_argument("run_campaign: empty dataset");
  CampaignResult res;
  res.total_budget = config.query_budget;
  const std::vector<long long> schedule = restart_schedule(config);

  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const CampaignInput& item = dataset[i];
    CampaignRun run;
    run.input_index = static_cast<int>(i);
    try {
      // The pre-check and the final robustness check are bookkeeping, not
      // attack queries; neither touches a ledger.
      const Eigen::VectorXd clean_logits = h.logits(item.image.data.matrix());
      if (argmax_label(clean_logits) != item.label) {
        run.attacked = false;
        run.robust = false;
        res.runs.push_back(std::move(run));
        continue;
      }
      run.attacked = true;

      LossSpec loss;
      loss.kind = config.loss_kind;
      loss.label = item.label;
      loss.target = config.target;
      loss.shift = config.shift;
      if (loss.kind == LossSpec::Kind::TargetedCe && loss.target < 0) {
        throw std::invalid_argument("targeted campaign needs a target label");
      }

      ImageTensor final_img = item.image;
      double best_value = std::numeric_limits<double>::infinity();
      long long cumulative = 0;
      for (std::size_t r = 0; r < schedule.size(); ++r) {
        const uint64_t run_seed = derive_seed(config.seed, i, r);
        const std::unique_ptr<AttackSpace> space =
            make_space(config.space, item.image.c, item.image.h, item.image.w, derive_seed(run_seed, 1));
        AttackObjective objective(*space, item.image, h, loss, schedule[r]);
        const RunRecord record = run_attack(config, objective, *space, run_seed);
        if (record.best_value < best_value) {
          best_value = record.best_value;
          final_img = objective.realize(record.best_point);
        }
        run.last = record;
        if (record.success) {
          run.success = true;
          run.queries_to_success = cumulative + record.success_query;
        }
        cumulative += record.queries_used;
        if (run.success) break;
      }
      run.queries_used = cumulative;
      run.l2_distortion = std::sqrt((final_img.data - item.image.data).square().sum());
      run.robust = argmax_label(h.logits(final_img.data.matrix())) == item.label;
      run.adversarial = std::move(final_img);
    } catch (const std::runtime_error& e) {
      res.aborted = true;
      res.abort_reason = e.what();
      res.runs.push_back(std::move(run));
      break;
    }
    res.runs.push_back(std::move(run));
  }

  res.stats = aggregate_stats(res.runs, config.query_budget);
  return res;
}

CampaignResult run_campaign(const ExperimentConfig& config) {
  if (config.dataset.empty()) throw std::invalid_argument("run_campaign: config has no dataset");
  std::vector<CampaignInput> dataset;
  dataset.reserve(config.dataset.size());
  for (const DatasetItem& item : config.dataset) {
    dataset.push_back({read_tensor(item.path), item.label});
  }
  const std::unique_ptr<Classifier> h = make_classifier(config.classifier, dataset[0].image.size());
  return run_campaign(config, *h, dataset);
}

}  // namespace cbopt
