#include "kselect/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kselect {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;

// linear-interpolation percentile on a sorted copy, p in [0, 100]
double percentile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  if (v.size() == 1) return v[0];
  const double pos = (static_cast<double>(v.size()) - 1.0) * p / 100.0;
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

double median_sorted(const std::vector<double>& v) {
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<double> pairwise_sq_distances(const DataMatrix& X) {
  const std::size_t n = X.n_rows, d = X.n_cols;
  std::vector<double> D(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = X.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double* xj = X.row(j);
      double s = 0.0;
      for (std::size_t f = 0; f < d; ++f) {
        const double diff = xi[f] - xj[f];
        s += diff * diff;
      }
      D[i * n + j] = s;
      D[j * n + i] = s;
    }
  }
  return D;
}

SimilarityMatrix similarity_matrix(const DataMatrix& X, std::optional<double> sigma,
                                   KernelForm form) {
  if (X.n_rows < 2) throw std::invalid_argument("similarity needs at least 2 rows");
  if (sigma && *sigma <= 0.0) throw std::invalid_argument("sigma must be positive");

  const std::size_t n = X.n_rows;
  std::vector<double> D = pairwise_sq_distances(X);

  double sig;
  if (sigma) {
    sig = *sigma;
  } else {
    std::vector<double> nz;
    nz.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (D[i * n + j] > 0.0) nz.push_back(std::sqrt(D[i * n + j]));
    if (nz.empty())
      throw std::runtime_error("median heuristic undefined: all rows identical");
    std::sort(nz.begin(), nz.end());
    sig = median_sorted(nz);
  }

  SimilarityMatrix S;
  S.n = n;
  S.sigma = sig;
  S.entries.assign(n * n, 1.0);
  const double inv = form == KernelForm::rbf ? 1.0 / (2.0 * sig * sig) : 1.0 / sig;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = form == KernelForm::rbf
                           ? std::exp(-D[i * n + j] * inv)
                           : std::exp(-std::sqrt(D[i * n + j]) * inv);
      S.entries[i * n + j] = v;
      S.entries[j * n + i] = v;
    }
  }
  return S;
}

std::vector<double> laplacian(const SimilarityMatrix& S) {
  const std::size_t n = S.n;
  std::vector<double> L(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 0.0;
    for (std::size_t j = 0; j < n; ++j) deg += S.entries[i * n + j];
    for (std::size_t j = 0; j < n; ++j) L[i * n + j] = -S.entries[i * n + j];
    L[i * n + i] += deg;
  }
  return L;
}

namespace {

// population covariance of the centered data, d x d
std::vector<double> covariance(const DataMatrix& X, std::vector<double>& col_means) {
  const std::size_t n = X.n_rows, d = X.n_cols;
  col_means.assign(d, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) col_means[c] += X.at(r, c);
  for (double& m : col_means) m /= static_cast<double>(n);

  std::vector<double> cov(d * d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t a = 0; a < d; ++a) {
      const double va = X.at(r, a) - col_means[a];
      for (std::size_t b = a; b < d; ++b)
        cov[a * d + b] += va * (X.at(r, b) - col_means[b]);
    }
  }
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      cov[a * d + b] /= static_cast<double>(n);
      cov[b * d + a] = cov[a * d + b];
    }
  return cov;
}

}  // namespace

std::vector<double> pca_project_1d(const DataMatrix& X) {
  if (X.n_rows < 2) throw std::invalid_argument("pca needs at least 2 rows");
  const std::size_t n = X.n_rows, d = X.n_cols;

  std::vector<double> means;
  const std::vector<double> cov = covariance(X, means);

  double total_var = 0.0;
  for (std::size_t a = 0; a < d; ++a) total_var += cov[a * d + a];
  if (total_var <= 0.0)
    throw std::runtime_error("pca undefined: all rows identical");

  const EigenDecomposition dec = symmetric_eigen_decomposition(cov, d);
  const std::size_t top = d - 1;  // ascending order, last is the principal axis

  std::vector<double> proj(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c)
      s += (X.at(r, c) - means[c]) * dec.vectors[c * d + top];
    proj[r] = s;
  }
  return proj;
}

DataMatrix pca_rotate(const DataMatrix& X) {
  if (X.n_rows < 2) throw std::invalid_argument("pca needs at least 2 rows");
  const std::size_t n = X.n_rows, d = X.n_cols;

  std::vector<double> means;
  const std::vector<double> cov = covariance(X, means);
  const EigenDecomposition dec = symmetric_eigen_decomposition(cov, d);

  DataMatrix Z(n, d);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c)
        s += (X.at(r, c) - means[c]) * dec.vectors[c * d + j];
      Z.at(r, j) = s;
    }
  return Z;
}

double silverman_bandwidth(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n == 0) throw std::invalid_argument("empty input");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(n));
  const double iqr = percentile(values, 75.0) - percentile(values, 25.0);

  double a = std::min(sd, iqr / 1.34);
  if (a == 0.0) a = std::max(sd, iqr / 1.34);
  if (a == 0.0) return 1.0;  // constant data, any positive width works
  return 0.9 * a * std::pow(static_cast<double>(n), -0.2);
}

DensityProfile kde_profile(const std::vector<double>& values, std::optional<double> h,
                           std::size_t grid_size, std::size_t smoothing_window,
                           double prominence) {
  const std::size_t n = values.size();
  if (n == 0) throw std::invalid_argument("empty input");
  if (grid_size < 3) throw std::invalid_argument("grid_size must be at least 3");
  if (h && *h <= 0.0) throw std::invalid_argument("bandwidth must be positive");

  DensityProfile prof;
  prof.bandwidth = h ? *h : silverman_bandwidth(values);

  auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  double lo = *mn - 3.0 * prof.bandwidth;
  double hi = *mx + 3.0 * prof.bandwidth;
  if (!(hi > lo)) {  // cannot happen for positive h, kept as a guard
    const double mid = 0.5 * (lo + hi);
    lo = mid - 1.0;
    hi = mid + 1.0;
  }

  const std::size_t g = grid_size;
  prof.grid.resize(g);
  const double step = (hi - lo) / static_cast<double>(g - 1);
  for (std::size_t i = 0; i < g; ++i) prof.grid[i] = lo + step * static_cast<double>(i);

  prof.density.assign(g, 0.0);
  const double norm = 1.0 / (static_cast<double>(n) * prof.bandwidth * kSqrt2Pi);
  for (std::size_t i = 0; i < g; ++i) {
    double s = 0.0;
    for (double x : values) {
      const double z = (prof.grid[i] - x) / prof.bandwidth;
      s += std::exp(-0.5 * z * z);
    }
    prof.density[i] = s * norm;
  }

  // moving average, zero-padded at the ends (denominator stays the full
  // window, so edge values shrink slightly; valley logic is interior-only)
  const std::size_t w = std::max<std::size_t>(1, smoothing_window);
  prof.smoothed.assign(g, 0.0);
  const std::ptrdiff_t offset = static_cast<std::ptrdiff_t>((w - 1) / 2);
  for (std::size_t i = 0; i < g; ++i) {
    double s = 0.0;
    for (std::size_t m = 0; m < w; ++m) {
      const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + offset -
                               static_cast<std::ptrdiff_t>(m);
      if (j >= 0 && j < static_cast<std::ptrdiff_t>(g))
        s += prof.density[static_cast<std::size_t>(j)];
    }
    prof.smoothed[i] = s / static_cast<double>(w);
  }

  const auto& sm = prof.smoothed;
  double gmax = 0.0;
  for (double v : sm) gmax = std::max(gmax, v);

  std::vector<std::size_t> valleys;
  for (std::size_t i = 1; i + 1 < g; ++i)
    if (sm[i - 1] > sm[i] && sm[i] < sm[i + 1]) valleys.push_back(i);

  // Drop the least prominent valley while it falls under the threshold;
  // prominence is measured against the flanking peaks between neighboring
  // surviving valleys (or the grid ends), so removing one valley can
  // rescue its neighbors.
  while (!valleys.empty()) {
    std::vector<std::size_t> bounds;
    bounds.push_back(0);
    bounds.insert(bounds.end(), valleys.begin(), valleys.end());
    bounds.push_back(g - 1);

    double worst = 0.0;
    std::size_t worst_j = 0;
    for (std::size_t j = 0; j < valleys.size(); ++j) {
      const std::size_t vi = valleys[j];
      double lpeak = 0.0, rpeak = 0.0;
      for (std::size_t t = bounds[j]; t <= vi; ++t) lpeak = std::max(lpeak, sm[t]);
      for (std::size_t t = vi; t <= bounds[j + 2]; ++t) rpeak = std::max(rpeak, sm[t]);
      const double p = std::min(lpeak - sm[vi], rpeak - sm[vi]);
      if (j == 0 || p < worst) {
        worst = p;
        worst_j = j;
      }
    }
    if (worst < prominence * gmax)
      valleys.erase(valleys.begin() + static_cast<std::ptrdiff_t>(worst_j));
    else
      break;
  }

  prof.valley_indices = std::move(valleys);
  prof.peak_count = prof.valley_indices.size() + 1;
  return prof;
}

}  // namespace kselect
