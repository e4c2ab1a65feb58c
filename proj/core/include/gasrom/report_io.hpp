#pragma once

// Report artifacts: summary CSV, plot-trace CSV and the JSON document.

#include <string>

#include "gasrom/bench.hpp"

namespace gasrom {

/// method,rmse_scaled,rmse_pa,fit_s,rollout_s,lambda,rank
std::string report_summary_csv(const Report& report);

/// t,truth_mean_p,<label>_mean_p,... (failed methods omitted)
std::string report_plot_csv(const Report& report);

/// SHA-256 of the report JSON with wall-clock timings left out; equal for
/// repeated runs of the same configuration.
std::string report_content_hash(const Report& report);

/// Full JSON document. Includes timings and `content_hash`.
std::string report_to_json(const Report& report);

}  // namespace gasrom
