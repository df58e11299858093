#include "kselect/serialize.hpp"

namespace kselect {

nlohmann::json to_json(const ClusteringResult& r) {
  return {
      {"k", r.k},
      {"assignments", r.assignments},
      {"centroids", r.centroids.values},
      {"n_cols", r.centroids.n_cols},
      {"dispersion", r.dispersion},
      {"iterations_run", r.iterations_run},
  };
}

nlohmann::json to_json(const DensityProfile& p) {
  return {
      {"bandwidth", p.bandwidth},
      {"peak_count", p.peak_count},
      {"valley_indices", p.valley_indices},
      {"grid_size", p.grid.size()},
  };
}

nlohmann::json to_json(const EigenSpectrum& s) {
  return {
      {"eigenvalues", s.eigenvalues},
      {"gaps", s.gaps},
  };
}

nlohmann::json to_json(const CcrCoiScore& s) {
  return {
      {"k", s.k},       {"ccr", s.ccr},         {"coi", s.coi},
      {"combined", s.combined}, {"raw_ccr", s.raw_ccr}, {"raw_coi", s.raw_coi},
  };
}

nlohmann::json to_json(const GapReport& g) {
  return {
      {"k_range", g.k_range},
      {"log_wk", g.log_wk},
      {"expected_log_wk_star", g.expected_log_wk_star},
      {"gap", g.gap},
      {"s_k", g.s_k},
      {"B", g.B},
      {"selected_k", g.selected_k},
      {"degenerate_box", g.degenerate_box},
  };
}

nlohmann::json to_json(const KEstimate& e) {
  nlohmann::json j = {
      {"method", method_name(e.method)},
      {"k", e.k},
      {"degenerate_data", e.degenerate_data},
  };
  if (e.density) j["density"] = to_json(*e.density);
  if (e.spectrum) j["spectrum"] = to_json(*e.spectrum);
  if (!e.scores.empty()) {
    nlohmann::json scores = nlohmann::json::array();
    for (const CcrCoiScore& s : e.scores) scores.push_back(to_json(s));
    j["scores"] = scores;
  }
  if (e.gap_report) j["gap"] = to_json(*e.gap_report);
  return j;
}

nlohmann::json to_json(const PipelineResult& r) {
  nlohmann::json estimates = nlohmann::json::array();
  for (const KEstimate& e : r.estimates) estimates.push_back(to_json(e));
  return {
      {"k_final", r.k_final},
      {"weights", r.weights},
      {"estimates", estimates},
  };
}

}  // namespace kselect
