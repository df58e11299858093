#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kselect/dataset.hpp"
#include "kselect/kmeans.hpp"

namespace kselect {

enum class BaselineMethod { wcss, dbi, silhouette_full, silhouette_condensed };

const char* baseline_name(BaselineMethod m);

struct MethodCurve {
  BaselineMethod method = BaselineMethod::wcss;
  std::vector<std::size_t> k_values;
  std::vector<double> scores;
  std::size_t selected_k = 0;
};

// Point-to-point / point-to-centroid distance evaluations performed by the
// metric functions below since the last reset. Criterion: condensed
// silhouette does exactly n*k of them per call, the full one n*(n-1)/2.
std::uint64_t distance_eval_count();
void reset_distance_eval_count();

// Elbow pick on the W_k curve: k maximizing the discrete second difference
// W_{k-1} - 2 W_k + W_{k+1} over interior k, ties to the smallest.
// Needs at least 3 entries in k_range.
MethodCurve wcss_select(const DataMatrix& X, const KRange& k_range,
                        const KMeansConfig& cfg = {});

// (1/k) sum_i max_{j != i} (sigma_i + sigma_j) / ||mu_i - mu_j||, with
// sigma = mean distance to own centroid. Throws on coincident centroids.
double davies_bouldin(const DataMatrix& X, const ClusteringResult& result);

// Classic silhouette over all point pairs; s(i) = 0 for singleton clusters
// and for degenerate a = b = 0 points.
double silhouette_full(const DataMatrix& X, const ClusteringResult& result);

// Centroid-based simplification: a(i) = distance to own centroid, b(i) =
// distance to the nearest foreign centroid. One pass over points x centroids.
double silhouette_condensed(const DataMatrix& X, const ClusteringResult& result);

enum class ScoreDirection { minimize, maximize };

std::size_t select_by_score(const std::vector<std::size_t>& k_values,
                            const std::vector<double>& scores,
                            ScoreDirection direction);

// Full selection sweep used as the timing comparator: fit per k, score via
// the given metric, pick by direction.
MethodCurve select_k_by_metric(const DataMatrix& X, const KRange& k_range,
                               const KMeansConfig& cfg, BaselineMethod metric);

}  // namespace kselect
