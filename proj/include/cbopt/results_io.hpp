#pragma once

#include <string>
#include <vector>

#include "cbopt/harness.hpp"

namespace cbopt {

// Query counts of attacked runs binned over [0, Q]: successes at their
// queries-to-success index, failures charged at Q (the last bin). Counts sum
// to the number of attacked runs.
struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<long long> counts;
};

Histogram query_histogram(const CampaignResult& result, int bins = 40);

// Stable key order, NaN statistics encoded as null; parse/emit round-trips
// byte-identically.
std::string stats_to_json(const CampaignStats& stats);
CampaignStats stats_from_json(const std::string& text);

// Writes stats.json, histogram.csv, a pca_<i>.csv for every run whose
// trajectory has at least 3 points, and adv_<i>.tensor for every success.
void export_results(const CampaignResult& result, const std::string& out_dir);

}  // namespace cbopt
