#pragma once

// JSON experiment configuration shared by every CLI subcommand.
//
//   { "solver":    { ..., "inlet": { ... } },
//     "features":  { "sets": [["p", "U"]] },
//     "reduction": { "energy_threshold", "max_rank", "rank" },
//     "opinf":     { "operators", "lambda_grid", "input_mode", "input_period" },
//     "bench":     { "methods", "block", "split", "data", "external" } }
//
// Unknown keys are rejected.

#include <span>
#include <string>
#include <string_view>

#include "gasrom/bench.hpp"

namespace gasrom {

/// Parses `json_text` (empty means all defaults), applies `key.path=value`
/// overrides, then validates. Values parse as JSON when possible and as a
/// bare string otherwise. Throws ConfigError.
ExperimentConfig parse_experiment_config(std::string_view json_text, std::span<const std::string> overrides = {});

/// Full configuration with every default made explicit; parses back to an
/// equal configuration.
std::string experiment_config_to_json(const ExperimentConfig& config);

}  // namespace gasrom
