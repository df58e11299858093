#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "kselect/numerics.hpp"
#include "kselect/rng.hpp"

using namespace kselect;

namespace {

std::vector<double> random_symmetric(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> M(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double v = rng.uniform(-3.0, 3.0);
      M[i * n + j] = v;
      M[j * n + i] = v;
    }
  return M;
}

// |M v - lambda v| per eigenpair
double residual(const std::vector<double>& M, std::size_t n,
                const EigenDecomposition& dec, std::size_t j) {
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double mv = 0.0;
    for (std::size_t c = 0; c < n; ++c) mv += M[i * n + c] * dec.vectors[c * n + j];
    worst = std::max(worst, std::abs(mv - dec.eigenvalues[j] * dec.vectors[i * n + j]));
  }
  return worst;
}

}  // namespace

TEST_CASE("hand-solvable eigenvalues") {
  // [[2,1],[1,2]]: eigenvalues 1 and 3
  const std::vector<double> A{2.0, 1.0, 1.0, 2.0};
  const EigenSpectrum s = symmetric_eigenvalues(A, 2);
  REQUIRE(s.eigenvalues.size() == 2);
  CHECK(s.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(s.eigenvalues[1] == doctest::Approx(3.0));
  REQUIRE(s.gaps.size() == 1);
  CHECK(s.gaps[0] == doctest::Approx(2.0));

  // diagonal matrix: eigenvalues are the sorted diagonal
  const std::vector<double> D{5.0, 0.0, 0.0, 0.0, -2.0, 0.0, 0.0, 0.0, 1.0};
  const EigenSpectrum ds = symmetric_eigenvalues(D, 3);
  CHECK(ds.eigenvalues[0] == doctest::Approx(-2.0));
  CHECK(ds.eigenvalues[1] == doctest::Approx(1.0));
  CHECK(ds.eigenvalues[2] == doctest::Approx(5.0));
}

TEST_CASE("the two eigenvalue routes agree on random symmetric matrices") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const std::size_t n = 40;
    const std::vector<double> M = random_symmetric(n, seed);

    std::vector<double> a = jacobi_eigenvalues(M, n);
    std::vector<double> b = tridiag_ql_eigenvalues(M, n);
    REQUIRE(a.size() == n);
    REQUIRE(b.size() == n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-8));

    // both sorted ascending
    CHECK(std::is_sorted(a.begin(), a.end()));
    CHECK(std::is_sorted(b.begin(), b.end()));
  }
}

TEST_CASE("eigenvalue sum and square-sum match trace invariants") {
  // sum(lambda) = tr(M), sum(lambda^2) = tr(M^2) = frobenius^2
  const std::size_t n = 23;
  const std::vector<double> M = random_symmetric(n, 9);
  const EigenSpectrum s = symmetric_eigenvalues(M, n);

  double trace = 0.0, frob2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    trace += M[i * n + i];
    for (std::size_t j = 0; j < n; ++j) frob2 += M[i * n + j] * M[i * n + j];
  }
  double lsum = 0.0, l2sum = 0.0;
  for (double v : s.eigenvalues) {
    lsum += v;
    l2sum += v * v;
  }
  CHECK(lsum == doctest::Approx(trace).epsilon(1e-9));
  CHECK(l2sum == doctest::Approx(frob2).epsilon(1e-9));
}

TEST_CASE("gap vector indexes eigenvalue differences") {
  const std::vector<double> D{1.0, 0.0, 0.0, 0.0, 4.0, 0.0, 0.0, 0.0, 9.0};
  const EigenSpectrum s = symmetric_eigenvalues(D, 3);
  REQUIRE(s.gaps.size() == 2);
  CHECK(s.gaps[0] == doctest::Approx(3.0));
  CHECK(s.gaps[1] == doctest::Approx(5.0));
}

TEST_CASE("laplacian of a disconnected graph has one zero eigenvalue per component") {
  // exact block structure: ones inside each block, zero across
  auto block_laplacian = [](const std::vector<std::size_t>& sizes) {
    std::size_t n = 0;
    for (std::size_t s : sizes) n += s;
    SimilarityMatrix S;
    S.n = n;
    S.sigma = 1.0;
    S.entries.assign(n * n, 0.0);
    std::size_t base = 0;
    for (std::size_t s : sizes) {
      for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) S.entries[(base + i) * n + (base + j)] = 1.0;
      base += s;
    }
    return laplacian(S);
  };

  for (const auto& sizes :
       {std::vector<std::size_t>{4, 6}, std::vector<std::size_t>{3, 5, 4}}) {
    std::size_t n = 0;
    for (std::size_t s : sizes) n += s;
    const EigenSpectrum spec = symmetric_eigenvalues(block_laplacian(sizes), n);

    std::size_t zeros = 0;
    for (double v : spec.eigenvalues)
      if (std::abs(v) < 1e-8) ++zeros;
    CHECK(zeros == sizes.size());

    // the eigengap points at the component count
    std::size_t best = 0;
    for (std::size_t i = 1; i < spec.gaps.size(); ++i)
      if (spec.gaps[i] > spec.gaps[best]) best = i;
    CHECK(best + 1 == sizes.size());
  }
}

TEST_CASE("full decomposition returns orthonormal eigenvectors") {
  const std::size_t n = 8;
  const std::vector<double> M = random_symmetric(n, 21);
  const EigenDecomposition dec = symmetric_eigen_decomposition(M, n);

  REQUIRE(dec.eigenvalues.size() == n);
  CHECK(std::is_sorted(dec.eigenvalues.begin(), dec.eigenvalues.end()));

  for (std::size_t j = 0; j < n; ++j) CHECK(residual(M, n, dec, j) < 1e-8);

  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        dot += dec.vectors[i * n + a] * dec.vectors[i * n + b];
      CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-9));
    }
}

TEST_CASE("asymmetric input is rejected") {
  std::vector<double> M{1.0, 2.0, 3.0, 4.0};
  CHECK_THROWS_AS(symmetric_eigenvalues(M, 2), std::invalid_argument);
  CHECK_THROWS_AS(symmetric_eigenvalues(std::vector<double>(5, 0.0), 2),
                  std::invalid_argument);
}
