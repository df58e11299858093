#include "kselect/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kselect/rng.hpp"

namespace kselect {

namespace {

double sq_dist(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t f = 0; f < d; ++f) {
    const double diff = a[f] - b[f];
    s += diff * diff;
  }
  return s;
}

DataMatrix init_kmeanspp(const DataMatrix& X, std::size_t k, Rng& rng) {
  const std::size_t n = X.n_rows, d = X.n_cols;
  DataMatrix C(k, d);
  const std::size_t first = rng.index(n);
  std::copy(X.row(first), X.row(first) + d, C.row(0));

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(X.row(i), C.row(0), d);

  for (std::size_t j = 1; j < k; ++j) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t pick;
    if (total <= 0.0) {
      pick = 0;  // all remaining points coincide with a centroid
    } else {
      const double r = rng.uniform() * total;
      double cum = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        cum += d2[i];
        if (cum >= r) {
          pick = i;
          break;
        }
      }
    }
    std::copy(X.row(pick), X.row(pick) + d, C.row(j));
    for (std::size_t i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], sq_dist(X.row(i), C.row(j), d));
  }
  return C;
}

DataMatrix init_random(const DataMatrix& X, std::size_t k, Rng& rng) {
  const std::size_t n = X.n_rows, d = X.n_cols;
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.index(n - i);
    std::swap(idx[i], idx[j]);
  }
  DataMatrix C(k, d);
  for (std::size_t j = 0; j < k; ++j)
    std::copy(X.row(idx[j]), X.row(idx[j]) + d, C.row(j));
  return C;
}

struct LloydOutcome {
  std::vector<std::size_t> assignments;
  DataMatrix centroids;
  double w = 0.0;
  std::size_t iterations = 0;
};

// nearest centroid per point; exact ties go to the lower index
void assign_points(const DataMatrix& X, const DataMatrix& C,
                   std::vector<std::size_t>& a, std::vector<double>& dist_own) {
  const std::size_t n = X.n_rows, k = C.n_rows, d = X.n_cols;
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = X.row(i);
    double best = std::numeric_limits<double>::infinity();
    std::size_t bj = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const double v = sq_dist(xi, C.row(j), d);
      if (v < best) {
        best = v;
        bj = j;
      }
    }
    a[i] = bj;
    dist_own[i] = best;
  }
}

LloydOutcome lloyd(const DataMatrix& X, std::size_t k, const KMeansConfig& cfg,
                   Rng& rng, std::size_t restart, const IterationHook& hook) {
  const std::size_t n = X.n_rows, d = X.n_cols;
  DataMatrix C = cfg.init == KMeansConfig::Init::kmeanspp ? init_kmeanspp(X, k, rng)
                                                          : init_random(X, k, rng);
  std::vector<std::size_t> a(n, 0);
  std::vector<double> dist_own(n, 0.0);
  std::vector<double> sums(k * d, 0.0);
  std::vector<std::size_t> counts(k, 0);
  std::size_t it = 0;

  for (it = 1; it <= cfg.max_iter; ++it) {
    assign_points(X, C, a, dist_own);

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* xi = X.row(i);
      double* s = sums.data() + a[i] * d;
      for (std::size_t f = 0; f < d; ++f) s[f] += xi[f];
      ++counts[a[i]];
    }

    DataMatrix newC(k, d);
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] > 0) {
        for (std::size_t f = 0; f < d; ++f)
          newC.at(j, f) = sums[j * d + f] / static_cast<double>(counts[j]);
      } else {
        // steal the point farthest from its current centroid
        std::size_t far = 0;
        for (std::size_t i = 1; i < n; ++i)
          if (dist_own[i] > dist_own[far]) far = i;
        std::copy(X.row(far), X.row(far) + d, newC.row(j));
        a[far] = j;
        dist_own[far] = 0.0;
      }
    }

    double shift = 0.0;
    for (std::size_t j = 0; j < k; ++j)
      shift = std::max(shift, std::sqrt(sq_dist(C.row(j), newC.row(j), d)));
    C = std::move(newC);

    if (hook) {
      double w = 0.0;
      std::vector<std::size_t> ta(n);
      std::vector<double> td(n);
      assign_points(X, C, ta, td);
      for (double v : td) w += v;
      hook(restart, it, w);
    }
    if (shift <= cfg.tol) break;
  }

  LloydOutcome out;
  out.assignments.assign(n, 0);
  std::vector<double> dfinal(n, 0.0);
  assign_points(X, C, out.assignments, dfinal);
  out.centroids = std::move(C);
  for (double v : dfinal) out.w += v;
  out.iterations = std::min(it, cfg.max_iter);
  return out;
}

}  // namespace

ClusteringResult fit_kmeans(const DataMatrix& X, std::size_t k, const KMeansConfig& cfg,
                            const IterationHook& hook) {
  if (k == 0) throw std::invalid_argument("k must be positive");
  if (k > X.n_rows) throw std::invalid_argument("k exceeds the number of rows");
  if (cfg.n_init == 0) throw std::invalid_argument("n_init must be positive");

  LloydOutcome best;
  bool have = false;
  for (std::size_t r = 0; r < cfg.n_init; ++r) {
    Rng rng(cfg.seed + r);
    LloydOutcome cand = lloyd(X, k, cfg, rng, r, hook);
    if (!have || cand.w < best.w) {
      best = std::move(cand);
      have = true;
    }
  }

  ClusteringResult res;
  res.k = k;
  res.assignments = std::move(best.assignments);
  res.centroids = std::move(best.centroids);
  res.dispersion = best.w;
  res.iterations_run = best.iterations;
  return res;
}

double dispersion(const DataMatrix& X, const ClusteringResult& result) {
  if (result.centroids.n_cols != X.n_cols || result.assignments.size() != X.n_rows)
    throw std::invalid_argument("clustering result does not match the matrix");
  double w = 0.0;
  for (std::size_t i = 0; i < X.n_rows; ++i)
    w += sq_dist(X.row(i), result.centroids.row(result.assignments[i]), X.n_cols);
  return w;
}

}  // namespace kselect
