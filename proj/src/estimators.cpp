#include "kselect/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kselect/rng.hpp"

namespace kselect {

namespace {

bool all_rows_identical(const DataMatrix& X) {
  for (std::size_t r = 1; r < X.n_rows; ++r)
    for (std::size_t c = 0; c < X.n_cols; ++c)
      if (X.at(r, c) != X.at(0, c)) return false;
  return true;
}

DataMatrix maybe_sample(const DataMatrix& X, std::size_t cap, std::uint64_t seed) {
  if (cap == 0 || X.n_rows <= cap) return X;
  return sample_rows(X, cap, seed);
}

double total_variance(const DataMatrix& X) {
  const std::size_t n = X.n_rows, d = X.n_cols;
  std::vector<double> mean(d, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) mean[c] += X.at(r, c);
  for (double& m : mean) m /= static_cast<double>(n);
  double s = 0.0;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      const double v = X.at(r, c) - mean[c];
      s += v * v;
    }
  return s / static_cast<double>(n);
}

double centroid_distance(const DataMatrix& C, std::size_t i, std::size_t j) {
  double s = 0.0;
  for (std::size_t f = 0; f < C.n_cols; ++f) {
    const double diff = C.at(i, f) - C.at(j, f);
    s += diff * diff;
  }
  return std::sqrt(s);
}

}  // namespace

const char* method_name(EstimatorMethod m) {
  switch (m) {
    case EstimatorMethod::density: return "density";
    case EstimatorMethod::local_structure: return "local_structure";
    case EstimatorMethod::ccr_coi: return "ccr_coi";
    case EstimatorMethod::gap: return "gap";
  }
  return "?";
}

KEstimate estimate_density_based(const DataMatrix& X, const DensityConfig& cfg) {
  if (X.n_rows < 2) throw std::invalid_argument("density estimator needs n >= 2");

  KEstimate est;
  est.method = EstimatorMethod::density;
  if (all_rows_identical(X)) {
    est.k = 1;
    est.degenerate_data = true;
    return est;
  }

  const DataMatrix Xs = maybe_sample(X, cfg.sample_size, cfg.seed);
  const std::vector<double> proj = pca_project_1d(Xs);

  const double h = cfg.h ? *cfg.h : silverman_bandwidth(proj) * cfg.h_scale;
  est.density = kde_profile(proj, h, cfg.grid_size, cfg.smoothing_window,
                            cfg.prominence);
  est.k = est.density->peak_count;
  return est;
}

KEstimate estimate_local_structure(const DataMatrix& X, const LocalStructureConfig& cfg) {
  if (X.n_rows < 3) throw std::invalid_argument("local-structure estimator needs n >= 3");

  KEstimate est;
  est.method = EstimatorMethod::local_structure;
  if (all_rows_identical(X)) {
    est.k = 1;
    est.degenerate_data = true;
    return est;
  }

  const DataMatrix Xs = maybe_sample(X, cfg.sample_size, cfg.seed);
  const std::size_t m = Xs.n_rows;

  double sigma;
  if (cfg.sigma) {
    sigma = *cfg.sigma;
  } else {
    // scaled median of the nonzero pairwise distances
    const std::vector<double> D = pairwise_sq_distances(Xs);
    std::vector<double> nz;
    nz.reserve(m * (m - 1) / 2);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        if (D[i * m + j] > 0.0) nz.push_back(std::sqrt(D[i * m + j]));
    if (nz.empty()) {
      est.k = 1;
      est.degenerate_data = true;
      return est;
    }
    std::sort(nz.begin(), nz.end());
    const double med = nz.size() % 2 ? nz[nz.size() / 2]
                                     : 0.5 * (nz[nz.size() / 2 - 1] + nz[nz.size() / 2]);
    sigma = med * cfg.sigma_median_scale;
  }

  const SimilarityMatrix S = similarity_matrix(Xs, sigma, cfg.kernel);
  const std::vector<double> L = laplacian(S);
  EigenSpectrum spec = symmetric_eigenvalues(L, m);

  const std::size_t hi = std::min(cfg.k_max, m - 1);  // gaps considered: gap_1..gap_hi
  std::size_t best = 0;
  for (std::size_t i = 1; i < hi; ++i)
    if (spec.gaps[i] > spec.gaps[best]) best = i;
  est.k = best + 1;
  est.spectrum = std::move(spec);
  return est;
}

double compute_ccr(const DataMatrix& X, const ClusteringResult& result) {
  const std::size_t k = result.k;
  std::vector<double> var(k, 0.0);
  std::vector<std::size_t> count(k, 0);
  for (std::size_t i = 0; i < X.n_rows; ++i) {
    const std::size_t j = result.assignments[i];
    double s = 0.0;
    for (std::size_t f = 0; f < X.n_cols; ++f) {
      const double diff = X.at(i, f) - result.centroids.at(j, f);
      s += diff * diff;
    }
    var[j] += s;
    ++count[j];
  }
  double ccr = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    if (count[j] == 0) throw std::invalid_argument("empty cluster in CCR");
    ccr += var[j] / static_cast<double>(count[j]);
  }
  return ccr / static_cast<double>(k);
}

double compute_coi(const DataMatrix& X, const ClusteringResult& result, double epsilon,
                   CoiVariant variant) {
  const std::size_t k = result.k;
  if (variant == CoiVariant::inverse_distance) {
    if (k < 2) throw std::invalid_argument("inverse-distance COI needs k >= 2");
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j)
        s += 1.0 / (centroid_distance(result.centroids, i, j) + epsilon);
    return s;
  }

  // misclassified fraction: points strictly closer to a foreign centroid
  std::size_t bad = 0;
  for (std::size_t i = 0; i < X.n_rows; ++i) {
    double own = 0.0;
    for (std::size_t f = 0; f < X.n_cols; ++f) {
      const double diff = X.at(i, f) - result.centroids.at(result.assignments[i], f);
      own += diff * diff;
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (j == result.assignments[i]) continue;
      double other = 0.0;
      for (std::size_t f = 0; f < X.n_cols; ++f) {
        const double diff = X.at(i, f) - result.centroids.at(j, f);
        other += diff * diff;
      }
      if (other < own) {
        ++bad;
        break;
      }
    }
  }
  return static_cast<double>(bad) / static_cast<double>(X.n_rows);
}

KEstimate estimate_ccr_coi(const DataMatrix& X, const KRange& k_range,
                           const KMeansConfig& cfg, double epsilon, CoiVariant variant,
                           ScoreNorm norm) {
  if (k_range.lo < 2 || k_range.hi > X.n_rows || k_range.lo > k_range.hi)
    throw std::invalid_argument("k range must lie within [2, n]");

  const std::vector<std::size_t> ks = k_range.expand();
  const double tv = total_variance(X);

  std::vector<CcrCoiScore> rows(ks.size());
  std::vector<double> overlap_sq(ks.size(), 0.0);
  for (std::size_t t = 0; t < ks.size(); ++t) {
    const std::size_t k = ks[t];
    const ClusteringResult fit = fit_kmeans(X, k, cfg);

    rows[t].k = k;
    rows[t].raw_ccr = compute_ccr(X, fit);
    rows[t].raw_coi = k >= 2 || variant == CoiVariant::misclassified_fraction
                          ? compute_coi(X, fit, epsilon, variant)
                          : 0.0;

    // per-cluster rms radii for the pairwise overlap term
    std::vector<double> var(k, 0.0);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < X.n_rows; ++i) {
      const std::size_t j = fit.assignments[i];
      double s = 0.0;
      for (std::size_t f = 0; f < X.n_cols; ++f) {
        const double diff = X.at(i, f) - fit.centroids.at(j, f);
        s += diff * diff;
      }
      var[j] += s;
      ++count[j];
    }
    std::vector<double> sig(k, 0.0);
    for (std::size_t j = 0; j < k; ++j)
      sig[j] = std::sqrt(var[j] / static_cast<double>(count[j]));
    double ov = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j) {
        const double r = (sig[i] + sig[j]) /
                         (centroid_distance(fit.centroids, i, j) + epsilon);
        ov += r * r;
      }
    overlap_sq[t] = ov;
  }

  switch (norm) {
    case ScoreNorm::variance_ratio:
      for (std::size_t t = 0; t < ks.size(); ++t) {
        rows[t].ccr = tv > 0.0 ? rows[t].raw_ccr / tv : 0.0;
        rows[t].coi = overlap_sq[t];
      }
      break;
    case ScoreNorm::minmax: {
      auto scaled = [&](auto get) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t t = 0; t < ks.size(); ++t) {
          lo = std::min(lo, get(t));
          hi = std::max(hi, get(t));
        }
        std::vector<double> out(ks.size(), 0.0);
        if (hi > lo)
          for (std::size_t t = 0; t < ks.size(); ++t)
            out[t] = (get(t) - lo) / (hi - lo);
        return out;
      };
      const auto cs = scaled([&](std::size_t t) { return rows[t].raw_ccr; });
      const auto os = scaled([&](std::size_t t) { return rows[t].raw_coi; });
      for (std::size_t t = 0; t < ks.size(); ++t) {
        rows[t].ccr = cs[t];
        rows[t].coi = os[t];
      }
      break;
    }
    case ScoreNorm::raw:
      for (std::size_t t = 0; t < ks.size(); ++t) {
        rows[t].ccr = rows[t].raw_ccr;
        rows[t].coi = rows[t].raw_coi;
      }
      break;
  }

  std::size_t best = 0;
  for (std::size_t t = 0; t < ks.size(); ++t) {
    rows[t].combined = rows[t].ccr + rows[t].coi;
    if (rows[t].combined < rows[best].combined) best = t;  // ties keep smallest k
  }

  KEstimate est;
  est.method = EstimatorMethod::ccr_coi;
  est.k = ks[best];
  est.scores = std::move(rows);
  return est;
}

namespace {

double log_dispersion(const DataMatrix& X, std::size_t k, const KMeansConfig& cfg) {
  const ClusteringResult fit = fit_kmeans(X, k, cfg);
  return std::log(std::max(fit.dispersion, 1e-300));
}

}  // namespace

GapReport compute_gap_statistics(const DataMatrix& X, const KRange& k_range,
                                 std::size_t B, const KMeansConfig& cfg,
                                 std::uint64_t seed) {
  if (B < 1) throw std::invalid_argument("B must be at least 1");
  if (k_range.lo < 1 || k_range.hi > X.n_rows || k_range.lo > k_range.hi)
    throw std::invalid_argument("k range must lie within [1, n]");

  const std::size_t n = X.n_rows, d = X.n_cols;
  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      lo[c] = std::min(lo[c], X.at(r, c));
      hi[c] = std::max(hi[c], X.at(r, c));
    }
  bool widened = false;
  for (std::size_t c = 0; c < d; ++c)
    if (hi[c] <= lo[c]) {  // flat dimension: widen so the box has volume
      const double w = std::max(std::abs(lo[c]), 1.0) * 1e-12;
      lo[c] -= w;
      hi[c] += w;
      widened = true;
    }

  // B reference sets drawn once, reused at every k
  Rng rng(seed);
  std::vector<DataMatrix> refs;
  refs.reserve(B);
  for (std::size_t b = 0; b < B; ++b) {
    DataMatrix R(n, d);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < d; ++c) R.at(r, c) = rng.uniform(lo[c], hi[c]);
    refs.push_back(std::move(R));
  }

  GapReport rep;
  rep.B = B;
  rep.degenerate_box = widened;
  rep.k_range = k_range.expand();
  const std::size_t nk = rep.k_range.size();
  rep.log_wk.resize(nk);
  rep.expected_log_wk_star.resize(nk);
  rep.gap.resize(nk);
  rep.s_k.resize(nk);
  rep.ref_log_wk.assign(nk, std::vector<double>(B, 0.0));

  for (std::size_t t = 0; t < nk; ++t) {
    const std::size_t k = rep.k_range[t];
    rep.log_wk[t] = log_dispersion(X, k, cfg);

    double mean = 0.0;
    for (std::size_t b = 0; b < B; ++b) {
      KMeansConfig rcfg = cfg;
      rcfg.seed = cfg.seed + 1 + b;
      rep.ref_log_wk[t][b] = log_dispersion(refs[b], k, rcfg);
      mean += rep.ref_log_wk[t][b];
    }
    mean /= static_cast<double>(B);

    double var = 0.0;
    for (std::size_t b = 0; b < B; ++b) {
      const double dv = rep.ref_log_wk[t][b] - mean;
      var += dv * dv;
    }
    var /= static_cast<double>(B);

    rep.expected_log_wk_star[t] = mean;
    rep.gap[t] = mean - rep.log_wk[t];
    rep.s_k[t] = std::sqrt(var) * std::sqrt(1.0 + 1.0 / static_cast<double>(B));
  }

  rep.selected_k = select_k_gap(rep);
  return rep;
}

std::size_t select_k_gap(const GapReport& report, double se_multiplier) {
  const std::size_t nk = report.k_range.size();
  if (nk == 0) throw std::invalid_argument("empty gap report");
  for (std::size_t t = 0; t + 1 < nk; ++t)
    if (report.gap[t] >= report.gap[t + 1] - se_multiplier * report.s_k[t + 1])
      return report.k_range[t];
  std::size_t best = 0;
  for (std::size_t t = 1; t < nk; ++t)
    if (report.gap[t] > report.gap[best]) best = t;
  return report.k_range[best];
}

std::size_t fuse_estimates(const std::array<KEstimate, 4>& estimates,
                           const FusionConfig& cfg) {
  double k_of[4];
  bool seen[4] = {false, false, false, false};
  for (const KEstimate& e : estimates) {
    const auto m = static_cast<std::size_t>(e.method);
    if (seen[m]) throw std::invalid_argument("duplicate estimator method");
    seen[m] = true;
    k_of[m] = static_cast<double>(e.k);
  }
  for (bool s : seen)
    if (!s) throw std::invalid_argument("missing estimator method");

  double wsum = 0.0;
  for (double w : cfg.weights) {
    if (w < 0.0) throw std::invalid_argument("negative weight");
    wsum += w;
  }
  if (wsum <= 0.0) throw std::invalid_argument("weights sum to zero");

  double acc = 0.0;
  for (std::size_t i = 0; i < 4; ++i) acc += cfg.weights[i] / wsum * k_of[i];

  const double rounded = std::round(acc);  // half away from zero
  return static_cast<std::size_t>(std::max(1.0, rounded));
}

PipelineResult estimate_k(const DataMatrix& X, const PipelineConfig& cfg) {
  if (X.n_rows < 3) throw std::invalid_argument("estimate_k needs at least 3 rows");

  // The estimators see the data exactly as given. Z-scoring here looks
  // harmless but is not: per-feature scaling divides by the total variance,
  // which is dominated by the between-cluster part on exactly the features
  // that carry the separation. Those axes shrink, pure-noise axes stay at
  // unit spread, and well-separated blobs come out as weakly chained
  // filaments that the spectral and density stages cannot read. Callers
  // with incommensurate feature units should standardize() first and own
  // that choice.
  const DataMatrix& Z = X;

  // fixed stage-seed offsets from the master seed
  const std::uint64_t density_seed = cfg.seed + 11;
  const std::uint64_t local_seed = cfg.seed + 22;
  const std::uint64_t ccr_seed = cfg.seed + 33;
  const std::uint64_t gap_seed = cfg.seed + 44;

  PipelineResult out;

  DensityConfig dc = cfg.density;
  dc.seed = density_seed;
  out.estimates[0] = estimate_density_based(Z, dc);

  LocalStructureConfig lc = cfg.local;
  lc.seed = local_seed;
  out.estimates[1] = estimate_local_structure(Z, lc);

  {
    const DataMatrix Xc = maybe_sample(Z, cfg.ccr_sample_cap, ccr_seed);
    KRange kr = cfg.ccr_k_range;
    kr.hi = std::min(kr.hi, Xc.n_rows - 1);
    kr.lo = std::min(kr.lo, kr.hi);
    KMeansConfig km = cfg.kmeans;
    km.seed = ccr_seed;
    out.estimates[2] = estimate_ccr_coi(Xc, kr, km, cfg.epsilon, cfg.coi_variant,
                                        cfg.score_norm);
  }

  {
    DataMatrix Xg = maybe_sample(Z, cfg.gap_sample_cap, gap_seed + 77);
    if (cfg.gap_pca_rotate) Xg = pca_rotate(Xg);
    KRange kr = cfg.gap_k_range;
    kr.hi = std::min(kr.hi, Xg.n_rows - 1);
    kr.lo = std::min(kr.lo, kr.hi);
    KMeansConfig km = cfg.kmeans;
    km.seed = gap_seed;
    GapReport rep = compute_gap_statistics(Xg, kr, cfg.gap_B, km, gap_seed);
    rep.selected_k = select_k_gap(rep, cfg.gap_se_multiplier);
    KEstimate ge;
    ge.method = EstimatorMethod::gap;
    ge.k = rep.selected_k;
    ge.gap_report = std::move(rep);
    out.estimates[3] = std::move(ge);
  }

  double wsum = 0.0;
  for (double w : cfg.fusion.weights) wsum += w;
  for (std::size_t i = 0; i < 4; ++i) out.weights[i] = cfg.fusion.weights[i] / wsum;

  out.k_final = fuse_estimates(out.estimates, cfg.fusion);
  return out;
}

}  // namespace kselect
