#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kselect/baselines.hpp"
#include "kselect/dataset.hpp"
#include "kselect/estimators.hpp"

namespace kselect {

struct BlobSpec {
  std::size_t n_per_cluster = 100;
  std::size_t d = 2;
  std::size_t k_true = 3;
  double center_spread = 30.0;
  double cluster_sd = 1.0;
  std::uint64_t seed = 0;

  double separation_factor() const { return center_spread / cluster_sd; }
};

// k_true isotropic Gaussian clusters; centers drawn uniformly in a box of
// side center_spread and redrawn (up to 100 attempts) while any center
// pair sits closer than 10 cluster standard deviations. Labels follow
// cluster blocks.
std::pair<DataMatrix, std::vector<std::size_t>> generate_blobs(const BlobSpec& spec);

struct MethodRow {
  std::string method;
  std::size_t selected_k = 0;
  double silhouette_full_quality = 0.0;
  double silhouette_condensed_quality = 0.0;
  double elapsed_seconds = 0.0;       // median over timing trials
  double elapsed_mean_seconds = 0.0;  // mean over the same trials
  std::uint64_t distance_eval_count = 0;
  bool failed = false;
  std::string error;
};

struct BenchReport {
  std::string dataset_id;
  std::vector<MethodRow> rows;
  std::uint64_t seed = 0;
  nlohmann::json config_snapshot;
};

struct ComparisonConfig {
  KRange k_range{2, 10};
  KMeansConfig kmeans;
  PipelineConfig pipeline;
  std::size_t timing_trials = 3;  // plus one discarded warmup
  std::uint64_t seed = 0;
  std::string dataset_id = "dataset";
};

// methods: any of "proposed", "wcss", "dbi", "silhouette",
// "silhouette_condensed". A method that throws gets failed = true in its
// row; the others still run.
BenchReport run_comparison(const DataMatrix& X,
                           const std::vector<std::string>& methods,
                           const ComparisonConfig& cfg);

nlohmann::json report_to_json(const BenchReport& report);
std::string report_to_csv(const BenchReport& report);

// format: "json" or "csv". JSON carries "schema_version": 1.
void emit_report(const BenchReport& report, const std::string& format,
                 const std::string& path);

}  // namespace kselect
