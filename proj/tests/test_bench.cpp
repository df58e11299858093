#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <doctest.h>

#include "kselect/bench.hpp"
#include "kselect/serialize.hpp"

using namespace kselect;

namespace {

std::size_t line_count(const std::string& body) {
  std::size_t n = 0;
  for (char c : body)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("generate_blobs shape, labels and separation") {
  BlobSpec spec;
  spec.k_true = 3;
  spec.n_per_cluster = 50;
  spec.d = 2;
  spec.center_spread = 40.0;
  spec.cluster_sd = 1.0;
  spec.seed = 7;
  CHECK(spec.separation_factor() == doctest::Approx(40.0));

  const auto [X, labels] = generate_blobs(spec);
  REQUIRE(X.n_rows == 150);
  REQUIRE(X.n_cols == 2);
  REQUIRE(labels.size() == 150);

  // labels come in contiguous blocks of n_per_cluster
  for (std::size_t i = 0; i < 150; ++i) CHECK(labels[i] == i / 50);

  // per-label means sit at least 10 cluster sds apart
  std::vector<double> mx(3, 0.0), my(3, 0.0);
  for (std::size_t i = 0; i < 150; ++i) {
    mx[labels[i]] += X.at(i, 0);
    my[labels[i]] += X.at(i, 1);
  }
  for (std::size_t c = 0; c < 3; ++c) {
    mx[c] /= 50.0;
    my[c] /= 50.0;
  }
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = a + 1; b < 3; ++b) {
      const double gap = std::hypot(mx[a] - mx[b], my[a] - my[b]);
      CHECK(gap >= 10.0 - 1.0);  // sample means wobble around the true centers
    }

  // points stay near the box ([0, spread] plus Gaussian tails)
  for (std::size_t i = 0; i < 150; ++i) {
    CHECK(X.at(i, 0) > -10.0);
    CHECK(X.at(i, 0) < 50.0);
  }
}

TEST_CASE("generate_blobs is deterministic per seed") {
  BlobSpec spec;
  spec.seed = 123;
  const auto [X1, l1] = generate_blobs(spec);
  const auto [X2, l2] = generate_blobs(spec);
  CHECK(X1.values == X2.values);
  CHECK(l1 == l2);

  BlobSpec other = spec;
  other.seed = 124;
  const auto [X3, l3] = generate_blobs(other);
  CHECK(X1.values != X3.values);

  BlobSpec bad;
  bad.k_true = 0;
  CHECK_THROWS_AS(generate_blobs(bad), std::invalid_argument);
  BlobSpec bad_sd;
  bad_sd.cluster_sd = 0.0;
  CHECK_THROWS_AS(generate_blobs(bad_sd), std::invalid_argument);
}

TEST_CASE("run_comparison produces one row per requested method") {
  BlobSpec spec;
  spec.k_true = 3;
  spec.n_per_cluster = 30;
  spec.center_spread = 40.0;
  spec.seed = 5;
  const auto [X, labels] = generate_blobs(spec);

  ComparisonConfig cfg;
  cfg.k_range = {2, 6};
  cfg.timing_trials = 1;
  cfg.seed = 5;
  cfg.kmeans.seed = 5;
  cfg.pipeline.seed = 5;
  cfg.dataset_id = "unit-blobs";

  const std::vector<std::string> methods{"proposed", "wcss", "dbi", "silhouette",
                                         "silhouette_condensed", "bogus"};
  const BenchReport report = run_comparison(X, methods, cfg);

  REQUIRE(report.rows.size() == 6);
  CHECK(report.dataset_id == "unit-blobs");

  for (std::size_t i = 0; i < 5; ++i) {
    const MethodRow& row = report.rows[i];
    INFO(row.method);
    CHECK_FALSE(row.failed);
    CHECK(row.selected_k >= 2);
    CHECK(row.selected_k <= 6);
    CHECK(row.elapsed_seconds >= 0.0);
    CHECK(std::isfinite(row.silhouette_full_quality));
    CHECK(std::isfinite(row.silhouette_condensed_quality));
  }

  // three well-separated blobs: every working method lands on 3
  for (std::size_t i = 0; i < 5; ++i) CHECK(report.rows[i].selected_k == 3);

  // the silhouette sweeps actually exercise the counted paths
  CHECK(report.rows[3].distance_eval_count > 0);
  CHECK(report.rows[4].distance_eval_count > 0);

  const MethodRow& bogus = report.rows[5];
  CHECK(bogus.failed);
  CHECK(bogus.error.find("unknown") != std::string::npos);
}

TEST_CASE("report serialization") {
  BenchReport report;
  report.dataset_id = "demo";
  report.seed = 9;
  report.config_snapshot = {{"k_range", {{"lo", 2}, {"hi", 6}}}};

  MethodRow row;
  row.method = "wcss";
  row.selected_k = 3;
  row.silhouette_full_quality = 0.5;
  row.silhouette_condensed_quality = 0.25;
  row.elapsed_seconds = 0.125;
  row.elapsed_mean_seconds = 0.25;
  row.distance_eval_count = 42;
  report.rows.push_back(row);

  MethodRow failed;
  failed.method = "dbi";
  failed.failed = true;
  failed.error = "boom, with a comma";
  report.rows.push_back(failed);

  const nlohmann::json j = report_to_json(report);
  CHECK(j.at("schema_version") == 1);
  CHECK(j.at("dataset_id") == "demo");
  CHECK(j.at("seed") == 9);
  REQUIRE(j.at("methods").size() == 2);
  CHECK(j.at("methods")[0].at("method") == "wcss");
  CHECK(j.at("methods")[0].at("selected_k") == 3);
  CHECK(j.at("methods")[0].at("distance_eval_count") == 42);
  CHECK(j.at("methods")[1].at("failed") == true);

  const std::string csv = report_to_csv(report);
  CHECK(line_count(csv) == 3);  // header + 2 rows
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "method,selected_k,silhouette_full,silhouette_condensed,elapsed_seconds,"
        "elapsed_mean_seconds,distance_eval_count,failed,error");
  std::string line1;
  std::getline(in, line1);
  CHECK(line1.find("wcss,3,") == 0);
  std::string line2;
  std::getline(in, line2);
  CHECK(line2.find("\"boom, with a comma\"") != std::string::npos);

  // an empty method list still yields the header
  BenchReport empty;
  CHECK(line_count(report_to_csv(empty)) == 1);
}

TEST_CASE("emit_report writes both formats") {
  BenchReport report;
  report.dataset_id = "emit";
  MethodRow row;
  row.method = "wcss";
  row.selected_k = 2;
  report.rows.push_back(row);

  const auto dir = std::filesystem::temp_directory_path();
  const std::string jpath = (dir / "kselect_report.json").string();
  const std::string cpath = (dir / "kselect_report.csv").string();

  emit_report(report, "json", jpath);
  std::ifstream jin(jpath);
  nlohmann::json loaded;
  jin >> loaded;
  CHECK(loaded.at("schema_version") == 1);
  CHECK(loaded.at("dataset_id") == "emit");

  emit_report(report, "csv", cpath);
  std::ifstream cin_s(cpath);
  std::string first;
  std::getline(cin_s, first);
  CHECK(first.find("method,") == 0);

  CHECK_THROWS_AS(emit_report(report, "xml", jpath), std::invalid_argument);
  CHECK_THROWS_AS(emit_report(report, "json", "/nonexistent/dir/x.json"),
                  std::runtime_error);
}

TEST_CASE("result serialization is stable across identical runs") {
  BlobSpec spec;
  spec.k_true = 3;
  spec.n_per_cluster = 40;
  spec.center_spread = 40.0;
  spec.seed = 31;
  const auto [X, labels] = generate_blobs(spec);

  PipelineConfig cfg;
  cfg.seed = 31;
  const std::string a = to_json(estimate_k(X, cfg)).dump();
  const std::string b = to_json(estimate_k(X, cfg)).dump();
  CHECK(a == b);

  const std::string fa = to_json(fit_kmeans(X, 3, cfg.kmeans)).dump();
  const std::string fb = to_json(fit_kmeans(X, 3, cfg.kmeans)).dump();
  CHECK(fa == fb);
}
