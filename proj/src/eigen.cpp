#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "kselect/numerics.hpp"

// Two eigenvalue routes with different cost profiles:
//  - cyclic Jacobi: O(n^3) per sweep, unconditionally stable on symmetric
//    input, trivially verifiable. Used for small matrices and for the
//    eigenvector decomposition (feature-space covariances are tiny).
//  - Householder tridiagonalization followed by implicit-shift QL: the
//    classic dense-symmetric path, ~4n^3/3 flops once plus O(n^2) per
//    eigenvalue. Used for the large similarity Laplacians where Jacobi
//    sweeps would dominate the whole pipeline.
// Tests cross-check the two routes against each other on random input.

namespace kselect {

namespace {

constexpr std::size_t kJacobiMaxSweeps = 100;
constexpr double kJacobiTol = 1e-10;

double off_diagonal_norm(const std::vector<double>& a, std::size_t n) {
  double s = 0.0;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p + 1; q < n; ++q) s += 2.0 * a[p * n + q] * a[p * n + q];
  return std::sqrt(s);
}

double frobenius_norm(const std::vector<double>& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

// One cyclic sweep of Jacobi rotations on a (row-major, symmetric),
// optionally accumulating the rotations into v.
void jacobi_sweep(std::vector<double>& a, std::vector<double>* v, std::size_t n) {
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      const double apq = a[p * n + q];
      if (apq == 0.0) continue;
      const double app = a[p * n + p];
      const double aqq = a[q * n + q];
      const double theta = (aqq - app) / (2.0 * apq);
      const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                       (std::abs(theta) + std::sqrt(theta * theta + 1.0));
      const double c = 1.0 / std::sqrt(t * t + 1.0);
      const double s = t * c;

      a[p * n + p] = app - t * apq;
      a[q * n + q] = aqq + t * apq;
      a[p * n + q] = 0.0;
      a[q * n + p] = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == p || i == q) continue;
        const double aip = a[i * n + p];
        const double aiq = a[i * n + q];
        a[i * n + p] = c * aip - s * aiq;
        a[p * n + i] = a[i * n + p];
        a[i * n + q] = s * aip + c * aiq;
        a[q * n + i] = a[i * n + q];
      }
      if (v) {
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = (*v)[i * n + p];
          const double viq = (*v)[i * n + q];
          (*v)[i * n + p] = c * vip - s * viq;
          (*v)[i * n + q] = s * vip + c * viq;
        }
      }
    }
  }
}

void run_jacobi(std::vector<double>& a, std::vector<double>* v, std::size_t n) {
  const double scale = std::max(1.0, frobenius_norm(a));
  for (std::size_t sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a, n) <= kJacobiTol * scale) return;
    jacobi_sweep(a, v, n);
  }
  if (off_diagonal_norm(a, n) > kJacobiTol * scale * 1e3)
    throw std::runtime_error("jacobi eigensolver did not converge");
}

// Householder reduction of a symmetric matrix to tridiagonal form
// (diagonal d, sub-diagonal e; eigenvectors not accumulated).
void tridiagonalize(std::vector<double>& a, std::size_t n, std::vector<double>& d,
                    std::vector<double>& e) {
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  for (std::size_t i = n - 1; i >= 1; --i) {
    const std::size_t l = i - 1;
    double h = 0.0;
    if (l > 0) {
      double scale = 0.0;
      for (std::size_t k = 0; k <= l; ++k) scale += std::abs(a[i * n + k]);
      if (scale == 0.0) {
        e[i] = a[i * n + l];
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          a[i * n + k] /= scale;
          h += a[i * n + k] * a[i * n + k];
        }
        double f = a[i * n + l];
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        a[i * n + l] = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += a[j * n + k] * a[i * n + k];
          for (std::size_t k = j + 1; k <= l; ++k) g += a[k * n + j] * a[i * n + k];
          e[j] = g / h;
          f += e[j] * a[i * n + j];
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = a[i * n + j];
          e[j] = g = e[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k)
            a[j * n + k] -= f * e[k] + g * a[i * n + k];
        }
      }
    } else {
      e[i] = a[i * n + l];
    }
    d[i] = h;
  }
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i * n + i];
}

// Implicit-shift QL on a tridiagonal matrix; eigenvalues land in d.
void tridiag_ql(std::vector<double>& d, std::vector<double>& e, std::size_t n) {
  if (n == 1) return;
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  for (std::size_t l = 0; l < n; ++l) {
    std::size_t iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-15 * dd) break;
      }
      if (m != l) {
        if (iter++ == 50)
          throw std::runtime_error("ql eigensolver did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (std::size_t i = m; i-- > l;) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

void check_symmetric(const std::vector<double>& M, std::size_t n) {
  if (n == 0 || M.size() != n * n)
    throw std::invalid_argument("matrix size mismatch");
  const double scale = std::max(1.0, frobenius_norm(M));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(M[i * n + j] - M[j * n + i]) > 1e-9 * scale)
        throw std::invalid_argument("matrix is not symmetric");
}

}  // namespace

std::vector<double> jacobi_eigenvalues(std::vector<double> M, std::size_t n) {
  check_symmetric(M, n);
  run_jacobi(M, nullptr, n);
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = M[i * n + i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

std::vector<double> tridiag_ql_eigenvalues(std::vector<double> M, std::size_t n) {
  check_symmetric(M, n);
  std::vector<double> d, e;
  if (n == 1) return {M[0]};
  tridiagonalize(M, n, d, e);
  tridiag_ql(d, e, n);
  std::sort(d.begin(), d.end());
  return d;
}

EigenSpectrum symmetric_eigenvalues(const std::vector<double>& M, std::size_t n) {
  // Jacobi below the crossover where its extra sweeps stop mattering
  std::vector<double> ev = n <= 128 ? jacobi_eigenvalues(M, n)
                                    : tridiag_ql_eigenvalues(M, n);
  EigenSpectrum spec;
  spec.eigenvalues = std::move(ev);
  if (n > 1) {
    spec.gaps.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
      spec.gaps[i] = spec.eigenvalues[i + 1] - spec.eigenvalues[i];
  }
  return spec;
}

EigenDecomposition symmetric_eigen_decomposition(std::vector<double> M, std::size_t n) {
  check_symmetric(M, n);
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  run_jacobi(M, &v, n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return M[a * n + a] < M[b * n + b]; });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.vectors.assign(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues[j] = M[order[j] * n + order[j]];
    for (std::size_t i = 0; i < n; ++i) out.vectors[i * n + j] = v[i * n + order[j]];
  }
  return out;
}

}  // namespace kselect
