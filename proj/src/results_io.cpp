#include "cbopt/results_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "cbopt/pca.hpp"
#include "cbopt/tensor.hpp"

namespace cbopt {

using nlohmann::json;

Histogram query_histogram(const CampaignResult& result, int bins) {
  if (bins < 1) throw std::invalid_argument("query_histogram: bins must be >= 1");
  Histogram h;
  h.lo = 0.0;
  h.hi = static_cast<double>(result.total_budget);
  h.counts.assign(bins, 0);
  for (const CampaignRun& run : result.runs) {
    if (!run.attacked) continue;
    const double v = run.success ? static_cast<double>(run.queries_to_success) : h.hi;
    long long idx = h.hi > 0 ? static_cast<long long>(std::floor(v / h.hi * bins)) : 0;
    idx = std::clamp(idx, 0LL, static_cast<long long>(bins) - 1);
    ++h.counts[idx];
  }
  return h;
}

namespace {

json number_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

double null_or_number(const json& j, const std::string& key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.at(key).get<double>();
}

}  // namespace

std::string stats_to_json(const CampaignStats& stats) {
  json j;
  j["n_inputs"] = stats.n_inputs;
  j["n_attacked"] = stats.n_attacked;
  j["n_success"] = stats.n_success;
  j["n_skipped"] = stats.n_skipped;
  j["failure_rate"] = number_or_null(stats.failure_rate);
  j["avg_queries_success"] = number_or_null(stats.avg_queries_success);
  j["avg_queries_all"] = number_or_null(stats.avg_queries_all);
  j["median_queries_success"] = number_or_null(stats.median_queries_success);
  j["avg_l2"] = number_or_null(stats.avg_l2);
  j["robust_accuracy"] = number_or_null(stats.robust_accuracy);
  return j.dump(2) + "\n";
}

CampaignStats stats_from_json(const std::string& text) {
  const json j = json::parse(text);
  CampaignStats s;
  s.n_inputs = j.at("n_inputs").get<int>();
  s.n_attacked = j.at("n_attacked").get<int>();
  s.n_success = j.at("n_success").get<int>();
  s.n_skipped = j.at("n_skipped").get<int>();
  s.failure_rate = null_or_number(j, "failure_rate");
  s.avg_queries_success = null_or_number(j, "avg_queries_success");
  s.avg_queries_all = null_or_number(j, "avg_queries_all");
  s.median_queries_success = null_or_number(j, "median_queries_success");
  s.avg_l2 = null_or_number(j, "avg_l2");
  s.robust_accuracy = null_or_number(j, "robust_accuracy");
  return s;
}

void export_results(const CampaignResult& result, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + out_dir + "': " + ec.message());

  {
    const fs::path p = fs::path(out_dir) / "stats.json";
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    out << stats_to_json(result.stats);
  }

  {
    const Histogram h = query_histogram(result);
    const fs::path p = fs::path(out_dir) / "histogram.csv";
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    out << "bin_lo,bin_hi,count\n";
    const double width = (h.hi - h.lo) / static_cast<double>(h.counts.size());
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
      out << (h.lo + width * i) << "," << (h.lo + width * (i + 1)) << "," << h.counts[i] << "\n";
    }
  }

  for (const CampaignRun& run : result.runs) {
    if (run.last.trajectory.size() >= 3) {
      const PcaResult pca = pca_trajectory(run.last.trajectory);
      const fs::path p = fs::path(out_dir) / ("pca_" + std::to_string(run.input_index) + ".csv");
      std::ofstream out(p);
      if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
      out << "# explained";
      for (Eigen::Index i = 0; i < pca.explained.size(); ++i) out << "," << pca.explained[i];
      out << "\nindex,coord1,coord2,residual\n";
      for (Eigen::Index k = 0; k < pca.coords.rows(); ++k) {
        out << k << "," << pca.coords(k, 0) << "," << pca.coords(k, 1) << "," << pca.residuals[k] << "\n";
      }
    }
    if (run.success && run.adversarial.size() > 0) {
      const fs::path p = fs::path(out_dir) / ("adv_" + std::to_string(run.input_index) + ".tensor");
      write_tensor(p.string(), run.adversarial);
    }
  }
}

}  // namespace cbopt
