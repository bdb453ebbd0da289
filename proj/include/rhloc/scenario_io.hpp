#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "rhloc/netmodel.hpp"

namespace rhloc {

/// Scenario document schema (JSON):
///
///   {
///     "format": "rhloc-scenario", "version": 1,
///     "dimension": p,
///     "sensors": [[x, y], ...],          true positions, one row per sensor
///     "anchors": [[x, y], ...],
///     "edges": [{"i": 0, "j": 1, "range": d, "radius": R}, ...],
///     "anchor_links": [{"node": 0, "anchor": 2, "range": r, "radius": R}, ...],
///     "metadata": {...}                  optional, ignored on read
///   }
///
/// Doubles are written in shortest round-trip form, so read(write(s)) == s.
nlohmann::json scenario_to_json(const NetworkScenario& scenario);
NetworkScenario scenario_from_json(const nlohmann::json& doc);

void write_scenario(const std::filesystem::path& path, const NetworkScenario& scenario,
                    const nlohmann::json& metadata = nlohmann::json::object());
NetworkScenario read_scenario(const std::filesystem::path& path);

nlohmann::json positions_to_json(const Positions& positions);
Positions positions_from_json(const nlohmann::json& rows, int dim);

}  // namespace rhloc
