#pragma once

// Experiment orchestration: split, basis fit on train, regularization
// selection on validation, refit on train+val, blocked rollout across the
// test horizon, and pressure-row scoring.

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gasrom/baselines.hpp"
#include "gasrom/field_data.hpp"
#include "gasrom/opinf.hpp"
#include "gasrom/pod.hpp"
#include "gasrom/solver.hpp"

namespace gasrom {

/// Name of the forecast target field.
inline constexpr std::string_view kPressureField = "p";

/// How the inlet velocity reaches the reduced model.
enum class InputMode {
  Folded,  // U is part of the state; no external signal at test time
  Inlet,   // U at the inlet cell drives B u; continued periodically past the data
};

struct RankPolicy {
  double threshold = kDefaultEnergyThreshold;
  Eigen::Index max_rank = kDefaultMaxRank;
  std::optional<Eigen::Index> fixed;

  Eigen::Index resolve(const PodBasis& basis) const;
};

struct ExternalPrediction {
  std::string name;
  std::filesystem::path path;  // CSV in raw units, one row per test column
};

struct ExperimentConfig {
  SolverConfig solver;
  InletProfile inlet;
  std::optional<std::filesystem::path> data_path;  // SNP1 or CSV instead of generating
  std::vector<std::vector<std::string>> feature_sets{{"p", "U"}};
  RankPolicy rank;
  std::vector<std::string> methods{"opinf", "linear_ar", "persistence", "mean"};
  RegularizationConfig regularization;
  OperatorSet operators;  // c, A, H
  InputMode input_mode = InputMode::Folded;
  std::optional<double> input_period;  // defaults to the inlet period
  Eigen::Index block = 10;
  SplitRatios split;
  std::vector<ExternalPrediction> external;

  void validate() const;
};

/// Square root of the mean squared entrywise difference over the selected
/// rows (all rows when `rows` is empty) and all columns.
double rmse(const Eigen::MatrixXd& predicted, const Eigen::MatrixXd& truth, std::span<const Eigen::Index> rows = {});

/// Column-wise RMSE over the selected rows.
std::vector<double> error_curve(const Eigen::MatrixXd& predicted, const Eigen::MatrixXd& truth,
                                std::span<const Eigen::Index> rows = {});

/// Rows occupied by `field` in `layout`.
std::vector<Eigen::Index> field_rows(const FieldLayout& layout, std::string_view field);

/// Reads externally produced predictions (raw units) whose CSV must match the
/// layout and hold exactly `expected_columns` rows; returns scaled values.
Eigen::MatrixXd import_external_predictions(std::string_view csv, const FieldLayout& layout,
                                            Eigen::Index expected_columns);

/// Dataset restricted to one feature set and scaled on its training window.
struct PreparedData {
  SnapshotMatrix data;  // all columns, scaled with train statistics
  SplitCounts counts;
  DataSplit split;
  SnapshotMatrix history;  // train + validation
  std::vector<std::string> features;
  InputMode input_mode = InputMode::Folded;
  /// Scaled inlet velocity over all columns and its scaling (Inlet mode only).
  Eigen::MatrixXd inlet_signal;
  FieldLayout inlet_layout;
};

PreparedData prepare_data(const SnapshotMatrix& dataset, std::span<const std::string> features,
                          const SplitRatios& ratios, InputMode mode = InputMode::Folded);

/// A fitted forecaster, already retrained on train + validation.
struct FittedModel {
  std::string method;
  FieldLayout layout;  // state layout with training scaling
  std::optional<PodBasis> basis;
  std::optional<ReducedOperators> opinf;
  std::optional<LinearARModel> ar;
  std::optional<Eigen::VectorXd> mean_state;
  InputMode input_mode = InputMode::Folded;
  FieldLayout input_layout;  // scaling of U (Inlet mode only)
  std::optional<double> input_period;
  double dt = 0.0;
  std::optional<double> lambda;
  std::vector<LambdaScore> sweep;
  double fit_seconds = 0.0;

  std::optional<Eigen::Index> rank() const;
};

bool method_needs_basis(std::string_view method);

/// Fits `method` on `prepared` following the train / validation / refit
/// protocol. `basis` (already truncated) is required for reduced methods.
FittedModel fit_method(std::string_view method, const PreparedData& prepared, const PodBasis* basis,
                       const ExperimentConfig& config);

/// Forecasts n_steps columns past the end of `history` (scaled, in the
/// model's layout). `inlet_signal` is the scaled inlet velocity over the
/// history columns (Inlet mode only).
SnapshotMatrix forecast(const FittedModel& model, const SnapshotMatrix& history, Eigen::Index n_steps,
                        Eigen::Index block = 10, const Eigen::MatrixXd* inlet_signal = nullptr);

struct MethodResult {
  std::string label;  // method, or method@features when several feature sets run
  std::string method;
  std::string features;
  bool ok = false;
  std::string error;
  double rmse_scaled = 0.0;
  double rmse_pa = 0.0;
  double fit_seconds = 0.0;
  double rollout_seconds = 0.0;
  std::optional<double> lambda;
  std::optional<Eigen::Index> rank;
  std::vector<double> error_curve;    // Pa, per test column
  std::vector<double> mean_pressure;  // spatial-mean forecast pressure, Pa
  std::vector<LambdaScore> sweep;
};

struct FeatureRun {
  std::string features;
  Eigen::Index n_state = 0;
  std::optional<Eigen::Index> rank;
  double energy_captured = 0.0;
  std::string basis_error;
  std::string basis_fingerprint_fit;       // basis after the train fit
  std::string basis_fingerprint_forecast;  // basis used for the test forecast
  std::vector<double> shift_angles_deg;    // train vs test principal angles
  std::optional<double> max_shift_deg;
};

struct Report {
  std::string dataset_fingerprint;
  SplitCounts counts;
  double dt = 0.0;
  std::vector<double> test_times;
  std::vector<double> truth_mean_pressure;  // Pa
  std::vector<FeatureRun> runs;
  std::vector<MethodResult> methods;
  std::string config_json;  // echo of the resolved configuration
  std::vector<std::string> notes;

  const MethodResult* find(std::string_view label) const;
};

/// Loads or generates the dataset described by `config` (all known fields).
SnapshotMatrix resolve_dataset(const ExperimentConfig& config);

/// Runs every method on every feature set. Per-method failures are recorded
/// in the report instead of aborting the run.
Report run_experiment(const ExperimentConfig& config);
Report run_experiment(const ExperimentConfig& config, const SnapshotMatrix& dataset);

}  // namespace gasrom
