#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include <doctest.h>

#include "kselect/kmeans.hpp"
#include "kselect/rng.hpp"

using namespace kselect;

namespace {

// Exhaustive oracle: the globally optimal W over every assignment of n
// points to k non-empty clusters, computed straight from the definition.
// Exponential, so only for tiny fixtures.
double brute_force_best_w(const DataMatrix& X, std::size_t k) {
  const std::size_t n = X.n_rows, d = X.n_cols;
  std::vector<std::size_t> a(n, 0);
  double best = std::numeric_limits<double>::infinity();

  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= k;

  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = c % k;
      c /= k;
    }
    std::vector<double> mean(k * d, 0.0);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t f = 0; f < d; ++f) mean[a[i] * d + f] += X.at(i, f);
      ++count[a[i]];
    }
    if (std::find(count.begin(), count.end(), 0u) != count.end()) continue;
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t f = 0; f < d; ++f) mean[j * d + f] /= static_cast<double>(count[j]);
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t f = 0; f < d; ++f) {
        const double diff = X.at(i, f) - mean[a[i] * d + f];
        w += diff * diff;
      }
    best = std::min(best, w);
  }
  return best;
}

DataMatrix two_blobs(std::size_t n_per, std::uint64_t seed) {
  Rng rng(seed);
  DataMatrix X(2 * n_per, 2);
  for (std::size_t i = 0; i < n_per; ++i) {
    X.at(i, 0) = rng.normal(0.0, 0.5);
    X.at(i, 1) = rng.normal(0.0, 0.5);
    X.at(n_per + i, 0) = rng.normal(12.0, 0.5);
    X.at(n_per + i, 1) = rng.normal(12.0, 0.5);
  }
  return X;
}

}  // namespace

TEST_CASE("k-means reaches the global optimum on tiny fixtures") {
  // 1-D pairs: best split is {0,1} vs {10,11}, W = 4 * 0.25
  DataMatrix X(4, 1);
  X.at(0, 0) = 0.0;
  X.at(1, 0) = 1.0;
  X.at(2, 0) = 10.0;
  X.at(3, 0) = 11.0;

  CHECK(brute_force_best_w(X, 2) == doctest::Approx(1.0));
  const ClusteringResult fit = fit_kmeans(X, 2);
  CHECK(fit.dispersion == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.assignments[0] == fit.assignments[1]);
  CHECK(fit.assignments[2] == fit.assignments[3]);
  CHECK(fit.assignments[0] != fit.assignments[2]);

  // random 2-D fixture, k = 2 and 3, checked against the oracle
  Rng rng(77);
  DataMatrix Y(7, 2);
  for (double& v : Y.values) v = rng.uniform(0.0, 10.0);
  KMeansConfig cfg;
  cfg.n_init = 20;
  for (std::size_t k : {2u, 3u}) {
    const double oracle = brute_force_best_w(Y, k);
    const ClusteringResult f = fit_kmeans(Y, k, cfg);
    CHECK(f.dispersion == doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("dispersion decreases monotonically within each restart") {
  const DataMatrix X = two_blobs(40, 5);
  std::map<std::size_t, std::vector<double>> traces;
  KMeansConfig cfg;
  cfg.n_init = 4;
  fit_kmeans(X, 2, cfg, [&](std::size_t restart, std::size_t, double w) {
    traces[restart].push_back(w);
  });

  REQUIRE(traces.size() == 4);
  for (const auto& [restart, ws] : traces) {
    REQUIRE(!ws.empty());
    for (std::size_t t = 1; t < ws.size(); ++t) CHECK(ws[t] <= ws[t - 1] + 1e-9);
  }
}

TEST_CASE("same seed, same result") {
  const DataMatrix X = two_blobs(30, 9);
  KMeansConfig cfg;
  cfg.seed = 1234;
  const ClusteringResult a = fit_kmeans(X, 3, cfg);
  const ClusteringResult b = fit_kmeans(X, 3, cfg);
  CHECK(a.assignments == b.assignments);
  CHECK(a.centroids.values == b.centroids.values);
  CHECK(a.dispersion == b.dispersion);
  CHECK(a.iterations_run == b.iterations_run);
}

TEST_CASE("edge cases and validation") {
  const DataMatrix X = two_blobs(10, 2);

  // k = 1: centroid is the grand mean
  const ClusteringResult one = fit_kmeans(X, 1);
  std::vector<double> mean(2, 0.0);
  for (std::size_t i = 0; i < X.n_rows; ++i)
    for (std::size_t f = 0; f < 2; ++f) mean[f] += X.at(i, f);
  for (double& m : mean) m /= static_cast<double>(X.n_rows);
  CHECK(one.centroids.at(0, 0) == doctest::Approx(mean[0]));
  CHECK(one.centroids.at(0, 1) == doctest::Approx(mean[1]));

  // k = n: every point its own cluster, W = 0
  const ClusteringResult all = fit_kmeans(X, X.n_rows);
  CHECK(all.dispersion == doctest::Approx(0.0).epsilon(1e-12));
  std::vector<std::size_t> sorted = all.assignments;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);

  CHECK_THROWS_AS(fit_kmeans(X, 0), std::invalid_argument);
  CHECK_THROWS_AS(fit_kmeans(X, X.n_rows + 1), std::invalid_argument);
  KMeansConfig bad;
  bad.n_init = 0;
  CHECK_THROWS_AS(fit_kmeans(X, 2, bad), std::invalid_argument);
}

TEST_CASE("dispersion() recomputes the stored W") {
  const DataMatrix X = two_blobs(25, 31);
  const ClusteringResult fit = fit_kmeans(X, 2);
  CHECK(dispersion(X, fit) == doctest::Approx(fit.dispersion).epsilon(1e-12));
  CHECK(fit.iterations_run >= 1);

  ClusteringResult broken = fit;
  broken.assignments.pop_back();
  CHECK_THROWS_AS(dispersion(X, broken), std::invalid_argument);
}

TEST_CASE("random init also lands on separated blobs") {
  const DataMatrix X = two_blobs(30, 13);
  KMeansConfig cfg;
  cfg.init = KMeansConfig::Init::random;
  cfg.n_init = 10;
  const ClusteringResult fit = fit_kmeans(X, 2, cfg);
  // the two blobs are 12 sd apart; any sane fit splits them cleanly
  for (std::size_t i = 1; i < 30; ++i) CHECK(fit.assignments[i] == fit.assignments[0]);
  for (std::size_t i = 31; i < 60; ++i) CHECK(fit.assignments[i] == fit.assignments[30]);
  CHECK(fit.assignments[0] != fit.assignments[30]);
}
