#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "kselect/dataset.hpp"
#include "kselect/kmeans.hpp"
#include "kselect/numerics.hpp"

namespace kselect {

enum class EstimatorMethod { density, local_structure, ccr_coi, gap };

const char* method_name(EstimatorMethod m);

struct CcrCoiScore {
  std::size_t k = 0;
  double ccr = 0.0;       // after the configured normalization
  double coi = 0.0;       // after the configured normalization
  double combined = 0.0;  // always ccr + coi
  double raw_ccr = 0.0;   // mean intra-cluster variance, unnormalized
  double raw_coi = 0.0;   // compute_coi value for the configured variant
};

struct GapReport {
  std::vector<std::size_t> k_range;
  std::vector<double> log_wk;
  std::vector<double> expected_log_wk_star;  // E*[log W_k] over the B references
  std::vector<double> gap;                   // expected_log_wk_star - log_wk
  std::vector<double> s_k;
  std::vector<std::vector<double>> ref_log_wk;  // per k: log W_k*(b), b = 1..B
  std::size_t B = 0;
  std::size_t selected_k = 0;
  bool degenerate_box = false;  // some bounding-box dimension had zero width
};

// One estimator's answer plus the diagnostics that produced it; only the
// payload matching `method` is populated.
struct KEstimate {
  EstimatorMethod method = EstimatorMethod::density;
  std::size_t k = 1;
  bool degenerate_data = false;  // e.g. all rows identical; k forced to 1

  std::optional<DensityProfile> density;
  std::optional<EigenSpectrum> spectrum;
  std::vector<CcrCoiScore> scores;
  std::optional<GapReport> gap_report;
};

// ---- density valleys ----

struct DensityConfig {
  std::size_t sample_size = 1000;  // rows used, min(n, sample_size)
  std::uint64_t seed = 0;
  std::optional<double> h;      // explicit bandwidth; nullopt = Silverman * h_scale
  double h_scale = 0.5;         // applied to the Silverman bandwidth only
  std::size_t grid_size = 512;
  std::size_t smoothing_window = 5;
  double prominence = 0.05;
};

// k = peak count of the KDE profile on the 1-D PCA projection of a row
// sample. Degenerate (all-identical) input yields k = 1 with the flag set.
KEstimate estimate_density_based(const DataMatrix& X, const DensityConfig& cfg = {});

// ---- spectral eigengap ----

struct LocalStructureConfig {
  // Smaller than the other stages' caps: the dense eigensolve is O(m^3)
  // and dominates the whole pipeline beyond a few hundred rows. 400 rows
  // keep the spectrum stable on anything K-Means can handle anyway.
  std::size_t sample_size = 400;
  std::uint64_t seed = 0;
  std::optional<double> sigma;     // explicit kernel bandwidth
  double sigma_median_scale = 0.25;  // sigma = scale * median nonzero distance
  std::size_t k_max = 20;
  KernelForm kernel = KernelForm::rbf;
};

// Builds the similarity graph on a row sample, takes L = D - S, and returns
// k = argmax of the eigenvalue gaps within [1, k_max], counted from the
// smallest eigenvalue.
//
// The default bandwidth is median/4 rather than the plain median: on
// clustered data the median pairwise distance is a between-cluster
// distance, and a kernel that wide connects everything into one component.
// A quarter of it resolves cluster structure while keeping elongated
// clusters internally connected.
KEstimate estimate_local_structure(const DataMatrix& X,
                                   const LocalStructureConfig& cfg = {});

// ---- compactness / overlap scan ----

double compute_ccr(const DataMatrix& X, const ClusteringResult& result);

enum class CoiVariant { inverse_distance, misclassified_fraction };

double compute_coi(const DataMatrix& X, const ClusteringResult& result,
                   double epsilon = 1e-6,
                   CoiVariant variant = CoiVariant::inverse_distance);

enum class ScoreNorm {
  // Dimensionless default: ccr term = CCR / total variance of X, overlap
  // term = sum over centroid pairs of ((sigma_i + sigma_j)/(d_ij + eps))^2.
  // Both vanish for compact well-separated clusterings and neither is
  // pinned to a fixed value at the range ends, unlike min-max scaling,
  // which forces the scaled CCR to 1 at the smallest k (CCR decreases
  // monotonically in k) and so can never select it.
  variance_ratio,
  minmax,  // each term min-max scaled to [0,1] across the scanned range
  raw,     // plain CCR + COI, incomparable units and all
};

KEstimate estimate_ccr_coi(const DataMatrix& X, const KRange& k_range,
                           const KMeansConfig& cfg = {}, double epsilon = 1e-6,
                           CoiVariant variant = CoiVariant::inverse_distance,
                           ScoreNorm norm = ScoreNorm::variance_ratio);

// ---- gap statistic ----

// Gap(k) = E*[log W_k] - log W_k against B uniform reference draws from the
// axis-aligned bounding box of X; s_k = sd(log W_k*) * sqrt(1 + 1/B).
// selected_k is filled via select_k_gap.
GapReport compute_gap_statistics(const DataMatrix& X, const KRange& k_range,
                                 std::size_t B, const KMeansConfig& cfg,
                                 std::uint64_t seed);

// Smallest k with Gap(k) >= Gap(k+1) - se_multiplier * s_{k+1}; falls back
// to the k with maximal Gap when the rule never fires. se_multiplier = 1
// is the standard one-standard-error rule.
std::size_t select_k_gap(const GapReport& report, double se_multiplier = 1.0);

// ---- fusion ----

struct FusionConfig {
  // order: density, local_structure, ccr_coi, gap
  std::array<double, 4> weights{0.25, 0.25, 0.25, 0.25};
};

// round(sum w_i k_i) with weights normalized to sum 1, rounding half away
// from zero, clamped to >= 1. Throws if the four estimates do not cover
// the four methods or the weights are all zero / negative.
std::size_t fuse_estimates(const std::array<KEstimate, 4>& estimates,
                           const FusionConfig& cfg = {});

// ---- full pipeline ----

struct PipelineConfig {
  std::uint64_t seed = 0;
  FusionConfig fusion;
  DensityConfig density;
  LocalStructureConfig local;
  KMeansConfig kmeans;

  double epsilon = 1e-6;
  CoiVariant coi_variant = CoiVariant::inverse_distance;
  ScoreNorm score_norm = ScoreNorm::variance_ratio;
  KRange ccr_k_range{2, 20};        // upper end clamped to n-1
  std::size_t ccr_sample_cap = 500; // rows fed to the compactness scan

  // The gap stage differs from compute_gap_statistics' defaults in three
  // ways, all aimed at the estimator's role inside a vote: the data is
  // rotated to its principal axes so the uniform reference box hugs the
  // data (an axis-aligned box in high dimension is loose enough that the
  // gap curve keeps rising past the true k), the scan starts at 2 (the
  // fused vote is clamped to >= 1 anyway and k = 1 races k = 2 on the
  // tight rotated box), and the firing threshold uses two standard errors
  // on a subsample, which lets elongated-cluster draws stop at the first
  // plausible k instead of creeping upward.
  std::size_t gap_sample_cap = 150;
  KRange gap_k_range{2, 12};
  std::size_t gap_B = 10;
  double gap_se_multiplier = 2.0;
  bool gap_pca_rotate = true;
};

struct PipelineResult {
  std::array<KEstimate, 4> estimates;  // density, local, ccr_coi, gap
  std::array<double, 4> weights;       // normalized
  std::size_t k_final = 1;
};

// Runs the four estimators on the input as given and fuses them. The
// pipeline deliberately does not rescale features: z-scoring clustered
// data shrinks the axes that carry the separation (see the note inside).
// Standardize() first when columns use incommensurate units. Stage seeds
// derive from cfg.seed by fixed offsets so one master seed pins the
// whole run.
PipelineResult estimate_k(const DataMatrix& X, const PipelineConfig& cfg = {});

}  // namespace kselect
