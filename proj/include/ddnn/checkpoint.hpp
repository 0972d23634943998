#pragma once

#include <string>

#include <json.hpp>

#include "ddnn/orchestrator.hpp"

namespace ddnn {

/// {layer_widths, activation, params, seed}; params round-trip bit-exactly.
nlohmann::json network_to_json(const MlpNetwork& net);
MlpNetwork network_from_json(const nlohmann::json& j);

/// Full model state: nets, multipliers, dual moments, rho, outer iteration,
/// partition parameters and the normalization transform.
void save_model(const DdmModel& model, const std::string& path);
DdmModel load_model(const std::string& path);

}  // namespace ddnn
