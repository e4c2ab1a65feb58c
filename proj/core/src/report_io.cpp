#include "gasrom/report_io.hpp"

#include <json.hpp>

#include <cmath>

#include "gasrom/fingerprint.hpp"
#include "gasrom/snapshot_io.hpp"

namespace gasrom {

namespace {

using nlohmann::ordered_json;

ordered_json number_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json to_json(const Report& report, bool timings) {
  ordered_json root;
  root["dataset_fingerprint"] = report.dataset_fingerprint;
  root["split"] = {{"train", report.counts.train},
                   {"validation", report.counts.validation},
                   {"test", report.counts.test}};
  root["dt"] = report.dt;
  root["notes"] = report.notes;
  root["config"] = ordered_json::parse(report.config_json.empty() ? "{}" : report.config_json);

  ordered_json runs = ordered_json::array();
  for (const auto& run : report.runs) {
    ordered_json r;
    r["features"] = run.features;
    r["n_state"] = run.n_state;
    r["rank"] = run.rank ? ordered_json(*run.rank) : ordered_json(nullptr);
    r["energy_captured"] = run.energy_captured;
    if (!run.basis_error.empty()) r["basis_error"] = run.basis_error;
    r["basis_fingerprint_fit"] = run.basis_fingerprint_fit;
    r["basis_fingerprint_forecast"] = run.basis_fingerprint_forecast;
    r["shift_angles_deg"] = run.shift_angles_deg;
    r["max_shift_deg"] = run.max_shift_deg ? ordered_json(*run.max_shift_deg) : ordered_json(nullptr);
    runs.push_back(std::move(r));
  }
  root["feature_runs"] = std::move(runs);

  ordered_json methods = ordered_json::array();
  for (const auto& m : report.methods) {
    ordered_json j;
    j["label"] = m.label;
    j["method"] = m.method;
    j["features"] = m.features;
    j["ok"] = m.ok;
    if (!m.ok) j["error"] = m.error;
    j["rmse_scaled"] = number_or_null(m.rmse_scaled);
    j["rmse_pa"] = number_or_null(m.rmse_pa);
    if (timings) {
      j["fit_s"] = m.fit_seconds;
      j["rollout_s"] = m.rollout_seconds;
    }
    j["lambda"] = m.lambda ? number_or_null(*m.lambda) : ordered_json(nullptr);
    j["rank"] = m.rank ? ordered_json(*m.rank) : ordered_json(nullptr);
    ordered_json sweep = ordered_json::array();
    for (const auto& s : m.sweep) {
      sweep.push_back({{"lambda", s.lambda}, {"score", number_or_null(s.score)}, {"diverged", s.diverged}});
    }
    j["lambda_sweep"] = std::move(sweep);
    j["error_curve_pa"] = m.error_curve;
    methods.push_back(std::move(j));
  }
  root["methods"] = std::move(methods);
  root["test_times"] = report.test_times;
  root["truth_mean_pressure_pa"] = report.truth_mean_pressure;
  return root;
}

}  // namespace

std::string report_summary_csv(const Report& report) {
  std::string out = "method,rmse_scaled,rmse_pa,fit_s,rollout_s,lambda,rank\n";
  for (const auto& m : report.methods) {
    out += m.label;
    if (m.ok) {
      out += "," + format_double(m.rmse_scaled) + "," + format_double(m.rmse_pa);
    } else {
      out += ",,";
    }
    out += "," + format_double(m.fit_seconds) + "," + format_double(m.rollout_seconds);
    out += "," + (m.lambda ? format_double(*m.lambda) : std::string());
    out += "," + (m.rank ? std::to_string(*m.rank) : std::string());
    out += "\n";
  }
  return out;
}

std::string report_plot_csv(const Report& report) {
  std::string out = "t,truth_mean_p";
  for (const auto& m : report.methods) {
    if (m.ok) out += "," + m.label + "_mean_p";
  }
  out += "\n";
  for (std::size_t k = 0; k < report.test_times.size(); ++k) {
    out += format_double(report.test_times[k]) + "," + format_double(report.truth_mean_pressure[k]);
    for (const auto& m : report.methods) {
      if (m.ok) out += "," + format_double(m.mean_pressure[k]);
    }
    out += "\n";
  }
  return out;
}

std::string report_content_hash(const Report& report) { return sha256_hex(to_json(report, false).dump()); }

std::string report_to_json(const Report& report) {
  auto root = to_json(report, true);
  root["content_hash"] = report_content_hash(report);
  return root.dump(2) + "\n";
}

}  // namespace gasrom
