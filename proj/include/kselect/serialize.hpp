#pragma once

#include <json.hpp>

#include "kselect/estimators.hpp"
#include "kselect/kmeans.hpp"

namespace kselect {

// JSON views of the analysis results, used by the command line tool and by
// the reproducibility checks (two runs with the same seed must serialize
// to identical bytes). Timing never appears here for exactly that reason.

nlohmann::json to_json(const ClusteringResult& r);
nlohmann::json to_json(const DensityProfile& p);
nlohmann::json to_json(const EigenSpectrum& s);
nlohmann::json to_json(const CcrCoiScore& s);
nlohmann::json to_json(const GapReport& g);
nlohmann::json to_json(const KEstimate& e);
nlohmann::json to_json(const PipelineResult& r);

}  // namespace kselect
