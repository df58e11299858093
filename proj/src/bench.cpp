#include "kselect/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "kselect/rng.hpp"

namespace kselect {

namespace {

double min_center_gap(const std::vector<double>& centers, std::size_t k, std::size_t d) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      double s = 0.0;
      for (std::size_t f = 0; f < d; ++f) {
        const double diff = centers[i * d + f] - centers[j * d + f];
        s += diff * diff;
      }
      best = std::min(best, std::sqrt(s));
    }
  return best;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::pair<DataMatrix, std::vector<std::size_t>> generate_blobs(const BlobSpec& spec) {
  if (spec.k_true == 0 || spec.n_per_cluster == 0 || spec.d == 0)
    throw std::invalid_argument("blob spec needs k, n_per_cluster and d all positive");
  if (spec.cluster_sd <= 0.0)
    throw std::invalid_argument("cluster_sd must be positive");

  Rng rng(spec.seed);
  const std::size_t k = spec.k_true, d = spec.d;

  // Redraw the whole center set while any pair is too close; after 100
  // attempts keep the last draw rather than looping forever on a spread
  // too small for k.
  std::vector<double> centers(k * d);
  const double min_sep = 10.0 * spec.cluster_sd;
  for (int attempt = 0; attempt < 100; ++attempt) {
    for (double& c : centers) c = rng.uniform() * spec.center_spread;
    if (k < 2 || min_center_gap(centers, k, d) >= min_sep) break;
  }

  DataMatrix X(k * spec.n_per_cluster, d);
  std::vector<std::size_t> labels(X.n_rows);
  std::size_t r = 0;
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t i = 0; i < spec.n_per_cluster; ++i, ++r) {
      for (std::size_t f = 0; f < d; ++f)
        X.at(r, f) = centers[c * d + f] + rng.normal(0.0, spec.cluster_sd);
      labels[r] = c;
    }
  return {std::move(X), std::move(labels)};
}

BenchReport run_comparison(const DataMatrix& X,
                           const std::vector<std::string>& methods,
                           const ComparisonConfig& cfg) {
  BenchReport report;
  report.dataset_id = cfg.dataset_id;
  report.seed = cfg.seed;
  report.config_snapshot = {
      {"k_range", {{"lo", cfg.k_range.lo}, {"hi", cfg.k_range.hi}}},
      {"kmeans",
       {{"n_init", cfg.kmeans.n_init},
        {"max_iter", cfg.kmeans.max_iter},
        {"tol", cfg.kmeans.tol},
        {"seed", cfg.kmeans.seed},
        {"init", cfg.kmeans.init == KMeansConfig::Init::kmeanspp ? "kmeanspp" : "random"}}},
      {"pipeline_seed", cfg.pipeline.seed},
      {"fusion_weights", cfg.pipeline.fusion.weights},
      {"timing_trials", cfg.timing_trials},
  };

  for (const std::string& name : methods) {
    MethodRow row;
    row.method = name;
    try {
      std::function<std::size_t()> select;
      if (name == "proposed") {
        select = [&] { return estimate_k(X, cfg.pipeline).k_final; };
      } else if (name == "wcss") {
        select = [&] { return wcss_select(X, cfg.k_range, cfg.kmeans).selected_k; };
      } else if (name == "dbi") {
        select = [&] {
          return select_k_by_metric(X, cfg.k_range, cfg.kmeans, BaselineMethod::dbi)
              .selected_k;
        };
      } else if (name == "silhouette") {
        select = [&] {
          return select_k_by_metric(X, cfg.k_range, cfg.kmeans,
                                    BaselineMethod::silhouette_full)
              .selected_k;
        };
      } else if (name == "silhouette_condensed") {
        select = [&] {
          return select_k_by_metric(X, cfg.k_range, cfg.kmeans,
                                    BaselineMethod::silhouette_condensed)
              .selected_k;
        };
      } else {
        throw std::invalid_argument("unknown method '" + name + "'");
      }

      // Warmup run, excluded from timing; it doubles as the counted run
      // for the distance instrumentation.
      reset_distance_eval_count();
      row.selected_k = select();
      row.distance_eval_count = distance_eval_count();

      std::vector<double> trials;
      for (std::size_t t = 0; t < cfg.timing_trials; ++t) {
        const auto t0 = std::chrono::steady_clock::now();
        (void)select();
        const auto t1 = std::chrono::steady_clock::now();
        trials.push_back(std::chrono::duration<double>(t1 - t0).count());
      }
      if (!trials.empty()) {
        row.elapsed_seconds = median_of(trials);
        double sum = 0.0;
        for (double v : trials) sum += v;
        row.elapsed_mean_seconds = sum / static_cast<double>(trials.size());
      }

      if (row.selected_k >= 2) {
        const ClusteringResult fit = fit_kmeans(X, row.selected_k, cfg.kmeans);
        row.silhouette_full_quality = silhouette_full(X, fit);
        row.silhouette_condensed_quality = silhouette_condensed(X, fit);
      }
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

nlohmann::json report_to_json(const BenchReport& report) {
  nlohmann::json methods = nlohmann::json::array();
  for (const MethodRow& r : report.rows) {
    methods.push_back({
        {"method", r.method},
        {"selected_k", r.selected_k},
        {"silhouette_full", r.silhouette_full_quality},
        {"silhouette_condensed", r.silhouette_condensed_quality},
        {"elapsed_seconds", r.elapsed_seconds},
        {"elapsed_mean_seconds", r.elapsed_mean_seconds},
        {"distance_eval_count", r.distance_eval_count},
        {"failed", r.failed},
        {"error", r.error},
    });
  }
  return {
      {"schema_version", 1},
      {"dataset_id", report.dataset_id},
      {"seed", report.seed},
      {"config", report.config_snapshot},
      {"methods", methods},
  };
}

std::string report_to_csv(const BenchReport& report) {
  std::ostringstream out;
  out << "method,selected_k,silhouette_full,silhouette_condensed,"
         "elapsed_seconds,elapsed_mean_seconds,distance_eval_count,failed,error\n";
  for (const MethodRow& r : report.rows) {
    out << csv_field(r.method) << ',' << r.selected_k << ','
        << fmt_double(r.silhouette_full_quality) << ','
        << fmt_double(r.silhouette_condensed_quality) << ','
        << fmt_double(r.elapsed_seconds) << ',' << fmt_double(r.elapsed_mean_seconds)
        << ',' << r.distance_eval_count << ',' << (r.failed ? "true" : "false") << ','
        << csv_field(r.error) << '\n';
  }
  return out.str();
}

void emit_report(const BenchReport& report, const std::string& format,
                 const std::string& path) {
  std::string body;
  if (format == "json")
    body = report_to_json(report).dump(2) + "\n";
  else if (format == "csv")
    body = report_to_csv(report);
  else
    throw std::invalid_argument("unknown report format '" + format + "'");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << body;
}

}  // namespace kselect
