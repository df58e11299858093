#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "kselect/dataset.hpp"

namespace kselect {

// Symmetric n*n matrices are stored dense row-major in a flat vector.

std::vector<double> pairwise_sq_distances(const DataMatrix& X);

enum class KernelForm {
  rbf,        // exp(-d^2 / 2 sigma^2)
  plain_exp,  // exp(-d / sigma), kept for comparison runs
};

struct SimilarityMatrix {
  std::size_t n = 0;
  std::vector<double> entries;
  double sigma = 0.0;  // bandwidth actually used

  double at(std::size_t i, std::size_t j) const { return entries[i * n + j]; }
};

// sigma = nullopt selects the median heuristic (median of nonzero pairwise
// distances). Throws if that median is zero (all rows identical).
SimilarityMatrix similarity_matrix(const DataMatrix& X,
                                   std::optional<double> sigma = std::nullopt,
                                   KernelForm form = KernelForm::rbf);

// L = Deg - S, Deg_ii = row sum of S. Row sums of L vanish by construction.
std::vector<double> laplacian(const SimilarityMatrix& S);

struct EigenSpectrum {
  std::vector<double> eigenvalues;  // ascending
  std::vector<double> gaps;         // gaps[i] = lambda_{i+2} - lambda_{i+1}, size n-1
};

// Eigenvalues of a symmetric matrix, sorted ascending.
//
// Two independent routes: cyclic Jacobi sweeps (simple, self-checking,
// used for small n) and Householder tridiagonalization + implicit-shift QL
// (O(n^3/3) with a far smaller constant, used for large n). Both are
// exposed so tests can cross-check one against the other.
EigenSpectrum symmetric_eigenvalues(const std::vector<double>& M, std::size_t n);
std::vector<double> jacobi_eigenvalues(std::vector<double> M, std::size_t n);
std::vector<double> tridiag_ql_eigenvalues(std::vector<double> M, std::size_t n);

// Full symmetric eigen-decomposition. Columns of `vectors` are the
// eigenvectors matching `eigenvalues` (ascending). Jacobi, intended for
// small matrices (covariance of the feature space).
struct EigenDecomposition {
  std::vector<double> eigenvalues;
  std::vector<double> vectors;  // row-major n*n, column j = eigenvector j
};
EigenDecomposition symmetric_eigen_decomposition(std::vector<double> M, std::size_t n);

// Projection of the column-centered data onto its top principal axis.
std::vector<double> pca_project_1d(const DataMatrix& X);

// Rotation of the centered data into its principal axes (all components).
DataMatrix pca_rotate(const DataMatrix& X);

struct DensityProfile {
  std::vector<double> grid;      // ascending, uniform
  std::vector<double> density;   // raw KDE values, >= 0
  std::vector<double> smoothed;  // centered moving average of density
  double bandwidth = 0.0;
  std::vector<std::size_t> valley_indices;
  std::size_t peak_count = 1;
};

double silverman_bandwidth(const std::vector<double>& values);

// Gaussian KDE on a uniform grid over [min - 3h, max + 3h]. Valleys are
// strict local minima of the smoothed curve whose flanking peaks both
// exceed the valley by at least `prominence` of the global maximum;
// peak_count = retained valleys + 1. h = nullopt uses Silverman's rule.
DensityProfile kde_profile(const std::vector<double>& values,
                           std::optional<double> h = std::nullopt,
                           std::size_t grid_size = 512,
                           std::size_t smoothing_window = 5,
                           double prominence = 0.05);

}  // namespace kselect
