#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "p2stc/simulation.hpp"

namespace p2stc {

/// Scenario JSON fields: id, generators ("133,171"), matrix (catalog name,
/// "identity", "1011/1101", or a list of row strings), n_tx (optional check),
/// n_rx, L, frame_info_bits, eb_n0_db (list), metric, beta (number or "rule"),
/// min_frame_errors, max_frames, seed, workers, batch_frames, noiseless.
SimScenario scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimScenario& scenario);

/// Accepts a single scenario object or {"defaults": {...}, "scenarios": [...]}.
std::vector<SimScenario> scenarios_from_json(const nlohmann::json& j);
std::vector<SimScenario> load_scenarios(const std::string& path);

}  // namespace p2stc
