#pragma once

#include <json.hpp>

#include "seedstab/dataset.hpp"
#include "seedstab/ensemble.hpp"
#include "seedstab/forecasters.hpp"
#include "seedstab/harness.hpp"

// JSON forms used in config files and manifests. Parse failures surface as
// seedstab::Error with ErrorCode::InvalidConfig.
namespace seedstab {

using Json = nlohmann::json;

// {"kind": "LinearAR", "params": {"lags": 7, ...}}
Json to_json(const ForecasterKind& kind);
ForecasterKind forecaster_kind_from_json(const Json& j);

// {"components": [...], "weights": [...], "n_validation_windows": n}
Json to_json(const EnsembleSpec& spec);
EnsembleSpec ensemble_spec_from_json(const Json& j);

Json to_json(const SynthConfig& cfg);
SynthConfig synth_config_from_json(const Json& j);

Json to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const Json& j);

Json parse_json(std::string_view text);

} // namespace seedstab
