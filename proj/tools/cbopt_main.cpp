#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

#include <json.hpp>

#include "cbopt/harness.hpp"
#include "cbopt/ndjson.hpp"
#include "cbopt/expansion_checks.hpp"
#include "cbopt/results_io.hpp"

namespace {

using cbopt::ExperimentConfig;
using nlohmann::json;

json run_to_json(const cbopt::CampaignRun& run) {
  json j;
  j["input_index"] = run.input_index;
  j["attacked"] = run.attacked;
  j["success"] = run.success;
  j["queries_used"] = run.queries_used;
  if (run.success) j["queries_to_success"] = run.queries_to_success;
  if (std::isfinite(run.l2_distortion)) j["l2_distortion"] = run.l2_distortion;
  j["robust"] = run.robust;
  return j;
}

int finish_campaign(const cbopt::CampaignResult& result, const std::string& out_dir, bool per_run) {
  json report = json::parse(cbopt::stats_to_json(result.stats));
  if (per_run) {
    json runs = json::array();
    for (const cbopt::CampaignRun& run : result.runs) runs.push_back(run_to_json(run));
    report["runs"] = std::move(runs);
  }
  std::cout << report.dump(2) << "\n";
  if (!out_dir.empty()) cbopt::export_results(result, out_dir);
  if (result.aborted) {
    std::cerr << "campaign aborted: " << result.abort_reason << "\n";
    return 2;
  }
  return 0;
}

int cmd_campaign(const std::string& config_path, uint64_t seed, bool seed_set,
                 const std::string& out_dir, bool per_run) {
  ExperimentConfig config = cbopt::load_experiment_config(config_path);
  if (seed_set) config.seed = seed;
  return finish_campaign(cbopt::run_campaign(config), out_dir, per_run);
}

int cmd_attack(const std::string& config_path, const std::string& input_path, int label,
               uint64_t seed, bool seed_set, const std::string& out_dir) {
  ExperimentConfig config = cbopt::load_experiment_config(config_path);
  if (seed_set) config.seed = seed;
  if (!input_path.empty()) {
    config.dataset = {{input_path, label}};
  } else if (!config.dataset.empty()) {
    config.dataset.resize(1);
  } else {
    throw std::runtime_error("attack needs --input or a dataset entry in the config");
  }
  return finish_campaign(cbopt::run_campaign(config), out_dir, true);
}

int cmd_bench(const std::string& function, int dim, const std::string& optimizer, long long budget,
              long long iterations, uint64_t seed) {
  std::function<double(const Eigen::VectorXd&)> f;
  double box = 3.0;
  if (function == "sphere") {
    f = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
  } else if (function == "rastrigin") {
    box = 5.12;
    f = [](const Eigen::VectorXd& x) {
      double v = 10.0 * static_cast<double>(x.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        v += x[i] * x[i] - 10.0 * std::cos(2.0 * M_PI * x[i]);
      }
      return v;
    };
  } else {
    throw std::runtime_error("unknown bench function '" + function + "' (sphere, rastrigin)");
  }

  cbopt::BenchObjective objective(dim, f, budget);
  cbopt::BoxDomain domain(Eigen::VectorXd::Constant(dim, -box), Eigen::VectorXd::Constant(dim, box));

  ExperimentConfig config;
  config.max_iterations = iterations;
  config.seed = seed;
  if (optimizer == "cbo") {
    config.optimizer = ExperimentConfig::Optimizer::Cbo;
  } else if (optimizer == "ch") {
    config.optimizer = ExperimentConfig::Optimizer::Ch;
  } else if (optimizer == "nes") {
    config.optimizer = ExperimentConfig::Optimizer::Nes;
  } else if (optimizer == "simba") {
    config.optimizer = ExperimentConfig::Optimizer::OnePlusLambda;
    config.es.simba_rule = true;
    config.es.noise = cbopt::EsConfig::Noise::BasisAxis;
  } else if (optimizer == "cauchy_es") {
    config.optimizer = ExperimentConfig::Optimizer::CauchyOnePlusOne;
  } else {
    throw std::runtime_error("unknown optimizer '" + optimizer + "'");
  }

  const cbopt::RunRecord record = cbopt::run_attack(config, objective, domain, seed);
  json j;
  j["function"] = function;
  j["optimizer"] = optimizer;
  j["dim"] = dim;
  j["queries_used"] = record.queries_used;
  j["iterations"] = record.trajectory.size();
  j["best_value"] = record.best_value;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_verify(long long samples_nes, long long samples_ch, long long samples_cosine, uint64_t seed) {
  bool ok = true;
  const auto report_slope = [&ok](const char* name, const cbopt::SlopeCheck& check) {
    const bool pass = check.slope >= 1.25 && check.slope <= 1.75;
    ok = ok && pass;
    std::printf("%s: slope %.4f (expected in [1.25, 1.75]) %s\n", name, check.slope,
                pass ? "ok" : "FAIL");
    for (std::size_t i = 0; i < check.taus.size(); ++i) {
      std::printf("  tau %.4f -> error %.6e\n", check.taus[i], check.errors[i]);
    }
  };
  report_slope("nes expected step", cbopt::nes_slope_check(samples_nes, seed));
  report_slope("ch expected step", cbopt::ch_slope_check(samples_ch, seed));
  const double cosine = cbopt::ch_nes_cosine(samples_cosine, seed);
  const bool cos_ok = cosine > 0.95;
  ok = ok && cos_ok;
  std::printf("ch/nes descent cosine: %.4f (expected > 0.95) %s\n", cosine, cos_ok ? "ok" : "FAIL");
  return ok ? 0 : 1;
}

int cmd_serve_echo(int port) {
  cbopt::NdjsonServer server(port, cbopt::echo_handler());
  std::cout << "listening on 127.0.0.1:" << server.port() << "\n" << std::flush;
  server.serve_forever();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"derivative-free optimization and closed-box adversarial attacks"};
  app.require_subcommand(1);

  std::string config_path, input_path, out_dir;
  uint64_t seed = 0;
  int label = 0;

  CLI::App* attack = app.add_subcommand("attack", "attack a single input");
  attack->add_option("--config", config_path, "experiment config (JSON)")->required();
  attack->add_option("--input", input_path, "input tensor file (overrides the config dataset)");
  attack->add_option("--label", label, "true label for --input");
  CLI::Option* attack_seed = attack->add_option("--seed", seed, "master seed override");
  attack->add_option("--out", out_dir, "output directory");

  CLI::App* campaign = app.add_subcommand("campaign", "attack a dataset and aggregate statistics");
  campaign->add_option("--config", config_path, "experiment config (JSON)")->required();
  CLI::Option* campaign_seed = campaign->add_option("--seed", seed, "master seed override");
  campaign->add_option("--out", out_dir, "output directory");
  bool per_run = false;
  campaign->add_flag("--per-run", per_run, "include per-run records in the report");

  std::string function = "sphere", optimizer = "cbo";
  int dim = 10;
  long long budget = 20000, iterations = 2000;
  uint64_t bench_seed = 1;
  CLI::App* bench = app.add_subcommand("bench", "run an optimizer on an analytic test function");
  bench->add_option("--function", function, "sphere | rastrigin");
  bench->add_option("--dim", dim, "dimension");
  bench->add_option("--optimizer", optimizer, "cbo | ch | nes | simba | cauchy_es");
  bench->add_option("--budget", budget, "query budget");
  bench->add_option("--iterations", iterations, "iteration cap");
  bench->add_option("--seed", bench_seed, "seed");

  long long samples_nes = 1000000, samples_ch = 100000, samples_cosine = 100000;
  uint64_t verify_seed = 20240817;
  CLI::App* verify = app.add_subcommand("verify", "expected-step expansion checks");
  verify->add_option("--samples-nes", samples_nes, "Monte-Carlo samples, NES side");
  verify->add_option("--samples-ch", samples_ch, "Monte-Carlo samples, CH side");
  verify->add_option("--samples-cosine", samples_cosine, "Monte-Carlo samples, cosine check");
  verify->add_option("--seed", verify_seed, "seed");

  int port = 0;
  CLI::App* serve = app.add_subcommand("serve-echo", "NDJSON echo server (logits := inputs)");
  serve->add_option("--port", port, "port to bind (0 = ephemeral)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (attack->parsed()) {
      return cmd_attack(config_path, input_path, label, seed, !attack_seed->empty(), out_dir);
    }
    if (campaign->parsed()) {
      return cmd_campaign(config_path, seed, !campaign_seed->empty(), out_dir, per_run);
    }
    if (bench->parsed()) return cmd_bench(function, dim, optimizer, budget, iterations, bench_seed);
    if (verify->parsed()) return cmd_verify(samples_nes, samples_ch, samples_cosine, verify_seed);
    if (serve->parsed()) return cmd_serve_echo(port);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
