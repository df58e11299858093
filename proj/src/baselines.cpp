#include "kselect/baselines.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace kselect {

namespace {

// Counts every point-to-point / point-to-centroid distance the metric
// functions below evaluate. The complexity claims for the two silhouette
// variants are asserted on this counter, not on wall-clock time.
std::atomic<std::uint64_t> g_distance_evals{0};

double dist(const double* a, const double* b, std::size_t d) {
  g_distance_evals.fetch_add(1, std::memory_order_relaxed);
  double s = 0.0;
  for (std::size_t f = 0; f < d; ++f) {
    const double diff = a[f] - b[f];
    s += diff * diff;
  }
  return std::sqrt(s);
}

void check_result(const DataMatrix& X, const ClusteringResult& r, std::size_t min_k) {
  if (r.assignments.size() != X.n_rows || r.centroids.n_cols != X.n_cols)
    throw std::invalid_argument("clustering result does not match the matrix");
  if (r.k < min_k)
    throw std::invalid_argument("metric needs at least " + std::to_string(min_k) +
                                " clusters");
}

}  // namespace

std::uint64_t distance_eval_count() {
  return g_distance_evals.load(std::memory_order_relaxed);
}

void reset_distance_eval_count() {
  g_distance_evals.store(0, std::memory_order_relaxed);
}

const char* baseline_name(BaselineMethod m) {
  switch (m) {
    case BaselineMethod::wcss: return "wcss";
    case BaselineMethod::dbi: return "dbi";
    case BaselineMethod::silhouette_full: return "silhouette_full";
    case BaselineMethod::silhouette_condensed: return "silhouette_condensed";
  }
  return "?";
}

MethodCurve wcss_select(const DataMatrix& X, const KRange& k_range,
                        const KMeansConfig& cfg) {
  const std::vector<std::size_t> ks = k_range.expand();
  if (ks.size() < 3)
    throw std::invalid_argument("elbow selection needs at least 3 k values");

  MethodCurve curve;
  curve.method = BaselineMethod::wcss;
  curve.k_values = ks;
  curve.scores.reserve(ks.size());
  for (std::size_t k : ks) curve.scores.push_back(fit_kmeans(X, k, cfg).dispersion);

  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_t = 1;
  for (std::size_t t = 1; t + 1 < ks.size(); ++t) {
    const double curv = curve.scores[t - 1] - 2.0 * curve.scores[t] + curve.scores[t + 1];
    if (curv > best) {  // strict: ties keep the smallest k
      best = curv;
      best_t = t;
    }
  }
  curve.selected_k = ks[best_t];
  return curve;
}

double davies_bouldin(const DataMatrix& X, const ClusteringResult& result) {
  check_result(X, result, 2);
  const std::size_t k = result.k, d = X.n_cols;

  std::vector<double> scatter(k, 0.0);
  std::vector<std::size_t> count(k, 0);
  for (std::size_t i = 0; i < X.n_rows; ++i) {
    const std::size_t j = result.assignments[i];
    scatter[j] += dist(X.row(i), result.centroids.row(j), d);
    ++count[j];
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (count[j] == 0) throw std::invalid_argument("empty cluster in DBI");
    scatter[j] /= static_cast<double>(count[j]);
  }

  double dbi = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (j == i) continue;
      const double sep = dist(result.centroids.row(i), result.centroids.row(j), d);
      if (sep == 0.0)
        throw std::runtime_error("coincident centroids " + std::to_string(i) + " and " +
                                 std::to_string(j) + " in DBI");
      worst = std::max(worst, (scatter[i] + scatter[j]) / sep);
    }
    dbi += worst;
  }
  return dbi / static_cast<double>(k);
}

double silhouette_full(const DataMatrix& X, const ClusteringResult& result) {
  check_result(X, result, 2);
  const std::size_t n = X.n_rows, k = result.k, d = X.n_cols;

  std::vector<std::size_t> count(k, 0);
  for (std::size_t i = 0; i < n; ++i) ++count[result.assignments[i]];

  // sum of distances from each point to each cluster, one pass over pairs
  std::vector<double> to_cluster(n * k, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dij = dist(X.row(i), X.row(j), d);
      to_cluster[i * k + result.assignments[j]] += dij;
      to_cluster[j * k + result.assignments[i]] += dij;
    }

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t own = result.assignments[i];
    if (count[own] <= 1) continue;  // singleton: s(i) = 0 by convention

    const double a = to_cluster[i * k + own] / static_cast<double>(count[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
      if (j == own || count[j] == 0) continue;
      b = std::min(b, to_cluster[i * k + j] / static_cast<double>(count[j]));
    }
    const double m = std::max(a, b);
    if (m > 0.0) total += (b - a) / m;
  }
  return total / static_cast<double>(n);
}

double silhouette_condensed(const DataMatrix& X, const ClusteringResult& result) {
  check_result(X, result, 2);
  const std::size_t n = X.n_rows, k = result.k, d = X.n_cols;

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t own = result.assignments[i];
    double a = 0.0;
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
      const double dij = dist(X.row(i), result.centroids.row(j), d);
      if (j == own)
        a = dij;
      else
        b = std::min(b, dij);
    }
    const double m = std::max(a, b);
    if (m > 0.0) total += (b - a) / m;
  }
  return total / static_cast<double>(n);
}

std::size_t select_by_score(const std::vector<std::size_t>& k_values,
                            const std::vector<double>& scores,
                            ScoreDirection direction) {
  if (k_values.empty() || k_values.size() != scores.size())
    throw std::invalid_argument("empty or mismatched score curve");
  std::size_t best = 0;
  for (std::size_t t = 1; t < scores.size(); ++t) {
    const bool better = direction == ScoreDirection::minimize ? scores[t] < scores[best]
                                                              : scores[t] > scores[best];
    if (better) best = t;
  }
  return k_values[best];
}

MethodCurve select_k_by_metric(const DataMatrix& X, const KRange& k_range,
                               const KMeansConfig& cfg, BaselineMethod metric) {
  if (metric == BaselineMethod::wcss) return wcss_select(X, k_range, cfg);

  MethodCurve curve;
  curve.method = metric;
  curve.k_values = k_range.expand();
  curve.scores.reserve(curve.k_values.size());
  for (std::size_t k : curve.k_values) {
    const ClusteringResult fit = fit_kmeans(X, k, cfg);
    double score = 0.0;
    switch (metric) {
      case BaselineMethod::dbi: score = davies_bouldin(X, fit); break;
      case BaselineMethod::silhouette_full: score = silhouette_full(X, fit); break;
      case BaselineMethod::silhouette_condensed:
        score = silhouette_condensed(X, fit);
        break;
      case BaselineMethod::wcss: break;  // handled above
    }
    curve.scores.push_back(score);
  }
  curve.selected_k = select_by_score(
      curve.k_values, curve.scores,
      metric == BaselineMethod::dbi ? ScoreDirection::minimize : ScoreDirection::maximize);
  return curve;
}

}  // namespace kselect
