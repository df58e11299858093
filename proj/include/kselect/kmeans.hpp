#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "kselect/dataset.hpp"

namespace kselect {

struct KRange {
  std::size_t lo = 2;
  std::size_t hi = 20;

  std::vector<std::size_t> expand() const {
    std::vector<std::size_t> ks;
    for (std::size_t k = lo; k <= hi; ++k) ks.push_back(k);
    return ks;
  }
};

struct KMeansConfig {
  enum class Init { kmeanspp, random };

  std::size_t n_init = 5;
  std::size_t max_iter = 300;
  double tol = 1e-6;  // centroid-shift convergence threshold
  std::uint64_t seed = 0;
  Init init = Init::kmeanspp;
};

struct ClusteringResult {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;
  DataMatrix centroids;
  double dispersion = 0.0;  // W_k
  std::size_t iterations_run = 0;
};

// Observes each Lloyd iteration of the winning restart path; used by tests
// to assert the per-iteration monotone decrease of W.
using IterationHook = std::function<void(std::size_t restart, std::size_t iter, double w)>;

// Best of cfg.n_init seeded restarts (restart r uses seed + r), lowest W_k
// wins, ties by restart order. Exact-distance assignment ties go to the
// lowest cluster index. Empty clusters are repaired by stealing the point
// farthest from its current centroid, so the result always has exactly k
// non-empty clusters.
ClusteringResult fit_kmeans(const DataMatrix& X, std::size_t k,
                            const KMeansConfig& cfg = {},
                            const IterationHook& hook = nullptr);

double dispersion(const DataMatrix& X, const ClusteringResult& result);

}  // namespace kselect
