#pragma once

#include "liegram/scenarios.hpp"

#include <filesystem>
#include <string_view>

namespace liegram {

// JSON scenario document. Matrices are row-major nested arrays; a schedule
// is either one matrix (constant) or a list of per-step matrices.
//
//   {
//     "name": "run", "platform": "SE2" | "SE3" | "generic",
//     "dt": 0.1, "horizon": 100,
//     "inputs": [v, omega] | [[v, omega], ...],       // SE2 / SE3
//     "factors": [1, 2], "F": M | [M, ...],            // generic
//     "Q": M | [M, ...], "P0": M,
//     "sensors": [{"name": "gps", "factor": 1, "H": M | [M, ...], "R": M}]
//   }
//
// With "factor" set, H is the local map on that factor (or a full-width
// matrix that is zero outside it). Throws InputError with a line/column or
// a JSON path on failure.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

// One sensor object in the format above, against a given factor structure.
Channel parse_sensor(std::string_view text, const FactorStructure& factors);

}  // namespace liegram
