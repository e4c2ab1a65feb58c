#include "gasrom/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "gasrom/config_io.hpp"
#include "gasrom/error.hpp"
#include "gasrom/fingerprint.hpp"
#include "gasrom/snapshot_io.hpp"

namespace gasrom {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string join(std::span<const std::string> parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string basis_fingerprint(const PodBasis& basis) {
  io::ByteWriter w;
  write_pod(w, basis);
  return sha256_hex(w.buffer());
}

}  // namespace

Eigen::Index RankPolicy::resolve(const PodBasis& basis) const {
  const Eigen::Index available = basis.modes.cols();
  if (fixed) {
    if (*fixed < 1 || *fixed > available) {
      throw ConfigError("fixed rank " + std::to_string(*fixed) + " outside [1, " + std::to_string(available) + "]");
    }
    return *fixed;
  }
  return std::min({select_rank(basis, threshold), max_rank, available});
}

void ExperimentConfig::validate() const {
  if (feature_sets.empty()) throw ConfigError("at least one feature set is required");
  for (const auto& set : feature_sets) {
    if (set.empty()) throw ConfigError("feature selection must not be empty");
    for (const auto& f : set) {
      if (!is_known_field(f)) throw ConfigError("unknown feature '" + f + "' (expected p, U, k, omega, nut)");
    }
    if (std::find(set.begin(), set.end(), std::string(kPressureField)) == set.end()) {
      throw ConfigError("feature set must contain the pressure field 'p'");
    }
  }
  if (methods.empty() && external.empty()) throw ConfigError("method list is empty");
  for (const auto& m : methods) {
    if (m != "opinf" && m != "linear_ar" && m != "persistence" && m != "mean") {
      throw ConfigError("unknown method '" + m + "' (expected opinf, linear_ar, persistence, mean)");
    }
  }
  if (block < 1) throw ConfigError("block size must be >= 1");
  if (!(rank.threshold > 0.0 && rank.threshold < 1.0)) throw ConfigError("energy threshold must lie in (0, 1)");
  if (rank.max_rank < 1) throw ConfigError("max rank must be >= 1");
  if (rank.fixed && *rank.fixed < 1) throw ConfigError("fixed rank must be >= 1");
  regularization.validate();
  if (!operators.any()) throw ConfigError("operator set is empty");
  if (operators.input != (input_mode == InputMode::Inlet)) {
    throw ConfigError("the B operator is used exactly when opinf.input_mode is \"inlet\"");
  }
  if (input_period && !(*input_period > 0.0)) throw ConfigError("input period must be positive");
  (void)split_counts(10, split);  // ratio checks
  if (!data_path) {
    solver.validate();
    inlet.validate();
  }
}

double rmse(const Eigen::MatrixXd& predicted, const Eigen::MatrixXd& truth, std::span<const Eigen::Index> rows) {
  if (predicted.rows() != truth.rows() || predicted.cols() != truth.cols()) {
    throw DimensionError("rmse: shape mismatch");
  }
  if (rows.empty()) {
    if (truth.size() == 0) return 0.0;
    return std::sqrt((predicted - truth).squaredNorm() / static_cast<double>(truth.size()));
  }
  double sum = 0.0;
  for (auto r : rows) {
    if (r < 0 || r >= truth.rows()) throw DimensionError("rmse: row mask index out of range");
    sum += (predicted.row(r) - truth.row(r)).squaredNorm();
  }
  const double count = static_cast<double>(rows.size()) * static_cast<double>(truth.cols());
  return count == 0.0 ? 0.0 : std::sqrt(sum / count);
}

std::vector<double> error_curve(const Eigen::MatrixXd& predicted, const Eigen::MatrixXd& truth,
                                std::span<const Eigen::Index> rows) {
  if (predicted.rows() != truth.rows() || predicted.cols() != truth.cols()) {
    throw DimensionError("error_curve: shape mismatch");
  }
  std::vector<double> curve;
  curve.reserve(static_cast<std::size_t>(truth.cols()));
  for (Eigen::Index k = 0; k < truth.cols(); ++k) {
    curve.push_back(rmse(predicted.col(k), truth.col(k), rows));
  }
  return curve;
}

std::vector<Eigen::Index> field_rows(const FieldLayout& layout, std::string_view field) {
  const auto start = static_cast<Eigen::Index>(layout.row_offset(field));
  const auto n = static_cast<Eigen::Index>(layout.at(field).size());
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = start + i;
  return rows;
}

Eigen::MatrixXd import_external_predictions(std::string_view csv, const FieldLayout& layout,
                                            Eigen::Index expected_columns) {
  const auto table = read_csv_for_layout(csv, layout);
  if (table.values.cols() != expected_columns) {
    throw FormatError("external predictions have " + std::to_string(table.values.cols()) + " rows, expected " +
                      std::to_string(expected_columns) + " (one per test column)");
  }
  if (!table.values.allFinite()) throw DataError("external predictions contain non-finite values");
  return scale_values(layout, table.values);
}

PreparedData prepare_data(const SnapshotMatrix& dataset, std::span<const std::string> features,
                          const SplitRatios& ratios, InputMode mode) {
  if (std::find(features.begin(), features.end(), std::string(kPressureField)) == features.end()) {
    throw ConfigError("feature set must contain the pressure field 'p'");
  }
  PreparedData out;
  out.counts = split_counts(dataset.n_times(), ratios);
  out.input_mode = mode;
  out.features.assign(features.begin(), features.end());

  std::vector<std::string> state_fields = out.features;
  if (mode == InputMode::Inlet) {
    std::erase(state_fields, std::string("U"));
    const std::vector<std::string> u_only{"U"};
    const auto u = rescale(select_fields(dataset, u_only), ScalingPolicy::standardize(out.counts.train));
    out.inlet_signal = u.values().topRows(1);
    out.inlet_layout = u.layout();
  }
  out.data = rescale(select_fields(dataset, state_fields), ScalingPolicy::standardize(out.counts.train));
  out.split = split_sequences(out.data, ratios);
  out.history = out.data.columns(0, out.counts.train + out.counts.validation);
  return out;
}

std::optional<Eigen::Index> FittedModel::rank() const {
  if (basis) return basis->modes.cols();
  return std::nullopt;
}

bool method_needs_basis(std::string_view method) { return method == "opinf" || method == "linear_ar"; }

namespace {

InputFunction make_input(const FittedModel& model, const Eigen::MatrixXd& signal, double t0, double dt) {
  if (model.input_mode != InputMode::Inlet) return {};
  return TabulatedInput(signal, t0, dt, model.input_period);
}

FittedModel fit_linear_ar_method(const PreparedData& prepared, const PodBasis& basis,
                                 const ExperimentConfig& config) {
  FittedModel model;
  const auto train = project(basis, prepared.split.train);
  const auto val = project(basis, prepared.split.validation);
  const Eigen::VectorXd x_last = train.col(train.cols() - 1);
  double best = std::numeric_limits<double>::infinity();
  std::optional<double> best_lambda;
  for (double lambda : config.regularization.grid) {
    LambdaScore score{lambda, std::numeric_limits<double>::infinity(), true};
    try {
      const auto candidate = fit_linear_ar(train, lambda, prepared.data.dt());
      const auto pred = ar_rollout(candidate, x_last, val.cols(), config.block);
      score.score = rmse(pred, val);
      score.diverged = !std::isfinite(score.score);
    } catch (const RolloutDivergenceError&) {
    }
    if (score.diverged) score.score = std::numeric_limits<double>::infinity();
    model.sweep.push_back(score);
    if (!score.diverged && score.score < best - 1e-12) {
      best = score.score;
      best_lambda = lambda;
    }
  }
  if (!best_lambda) throw FitError("linear_ar: every regularization value diverged on validation");
  model.ar = fit_linear_ar(project(basis, prepared.history), *best_lambda, prepared.data.dt());
  model.lambda = best_lambda;
  return model;
}

FittedModel fit_opinf_method(const PreparedData& prepared, const PodBasis& basis, const ExperimentConfig& config) {
  FittedModel model;
  model.input_mode = prepared.input_mode;
  model.input_layout = prepared.inlet_layout;
  model.input_period = config.input_period ? config.input_period : std::optional<double>(config.inlet.period);
  const double dt = prepared.data.dt();

  OpInfProblem problem;
  problem.train = project(basis, prepared.split.train);
  problem.validation = project(basis, prepared.split.validation);
  problem.t0 = prepared.data.t0();
  problem.dt = dt;
  const Eigen::Index n_hist = prepared.history.n_times();
  if (prepared.input_mode == InputMode::Inlet) {
    // Validation inputs are observed data; no extrapolation during selection.
    problem.input = TabulatedInput(prepared.inlet_signal.leftCols(n_hist), problem.t0, dt);
  }
  auto fit = fit_opinf(problem, config.operators, config.regularization);
  model.sweep = fit.sweep;
  model.lambda = fit.operators.lambda;

  const auto history = project(basis, prepared.history);
  const auto derivs = estimate_derivatives(history, dt);
  std::optional<Eigen::MatrixXd> inputs;
  if (prepared.input_mode == InputMode::Inlet) inputs = prepared.inlet_signal.leftCols(n_hist);
  model.opinf = fit_operators(history, derivs, inputs ? &*inputs : nullptr, config.operators, fit.operators.lambda, dt);
  if (!model.opinf->all_finite()) throw FitError("opinf: refit on train+validation produced non-finite operators");
  return model;
}

}  // namespace

FittedModel fit_method(std::string_view method, const PreparedData& prepared, const PodBasis* basis,
                       const ExperimentConfig& config) {
  const auto start = Clock::now();
  if (method_needs_basis(method) && basis == nullptr) {
    throw FitError(std::string(method) + " requires a POD basis");
  }
  FittedModel model;
  if (method == "persistence") {
  } else if (method == "mean") {
    model.mean_state = prepared.history.values().rowwise().mean();
  } else if (method == "linear_ar") {
    model = fit_linear_ar_method(prepared, *basis, config);
  } else if (method == "opinf") {
    model = fit_opinf_method(prepared, *basis, config);
  } else {
    throw ConfigError("unknown method '" + std::string(method) + "'");
  }
  model.method = std::string(method);
  model.layout = prepared.data.layout();
  model.dt = prepared.data.dt();
  if (method_needs_basis(method)) model.basis = *basis;
  model.fit_seconds = seconds_since(start);
  return model;
}

SnapshotMatrix forecast(const FittedModel& model, const SnapshotMatrix& history, Eigen::Index n_steps,
                        Eigen::Index block, const Eigen::MatrixXd* inlet_signal) {
  if (!(history.layout() == model.layout)) {
    throw DimensionError("forecast: history layout/scaling differs from the fitted model");
  }
  if (history.n_times() < 1) throw DimensionError("forecast: history is empty");
  if (n_steps < 0) throw DimensionError("forecast: negative step count");
  const double t_next = history.time(history.n_times());
  const Eigen::VectorXd last = history.values().col(history.n_times() - 1);

  if (model.method == "persistence") {
    return {model.layout, t_next, history.dt(), persistence_forecast(last, n_steps)};
  }
  if (model.method == "mean") {
    return {model.layout, t_next, history.dt(), model.mean_state->replicate(1, n_steps)};
  }
  if (model.method == "linear_ar") {
    const auto reduced = ar_rollout(*model.ar, project(*model.basis, last), n_steps, block);
    return reconstruct(*model.basis, reduced, t_next, history.dt());
  }
  if (model.method == "opinf") {
    InputFunction input;
    if (model.input_mode == InputMode::Inlet) {
      if (inlet_signal == nullptr || inlet_signal->cols() != history.n_times()) {
        throw ConfigError("forecast: inlet input mode needs the inlet signal over the history window");
      }
      input = make_input(model, *inlet_signal, history.t0(), history.dt());
    }
    return forecast_full(*model.opinf, *model.basis, history, n_steps, input, block);
  }
  throw ConfigError("forecast: unknown method '" + model.method + "'");
}

const MethodResult* Report::find(std::string_view label) const {
  auto it = std::find_if(methods.begin(), methods.end(), [&](const MethodResult& m) { return m.label == label; });
  return it == methods.end() ? nullptr : &*it;
}

SnapshotMatrix resolve_dataset(const ExperimentConfig& config) {
  if (config.data_path) {
    const auto& path = *config.data_path;
    if (path.extension() == ".csv") {
      const auto bytes = io::read_file(path);
      return snapshots_from_csv(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    }
    return load_snapshots(path);
  }
  std::vector<std::string> fields;
  for (const auto& set : config.feature_sets) {
    for (const auto& f : set) {
      if (std::find(fields.begin(), fields.end(), f) == fields.end()) fields.push_back(f);
    }
  }
  if (config.input_mode == InputMode::Inlet && std::find(fields.begin(), fields.end(), "U") == fields.end()) {
    fields.emplace_back("U");
  }
  // Canonical order keeps the dataset fingerprint independent of listing order.
  static const std::vector<std::string> canonical{"p", "U", "k", "omega", "nut"};
  std::vector<std::string> ordered;
  for (const auto& c : canonical) {
    if (std::find(fields.begin(), fields.end(), c) != fields.end()) ordered.push_back(c);
  }
  return generate_dataset(config.solver, config.inlet, ordered);
}

Report run_experiment(const ExperimentConfig& config) {
  config.validate();
  return run_experiment(config, resolve_dataset(config));
}

namespace {

void score(MethodResult& result, const SnapshotMatrix& predicted, const SnapshotMatrix& truth) {
  const auto rows = field_rows(truth.layout(), kPressureField);
  result.rmse_scaled = rmse(predicted.values(), truth.values(), rows);
  const Eigen::MatrixXd pred_raw = predicted.raw_values();
  const Eigen::MatrixXd truth_raw = truth.raw_values();
  result.rmse_pa = rmse(pred_raw, truth_raw, rows);
  result.error_curve = error_curve(pred_raw, truth_raw, rows);
  const auto p0 = rows.front();
  const auto np = static_cast<Eigen::Index>(rows.size());
  const Eigen::RowVectorXd mean_p = pred_raw.middleRows(p0, np).colwise().mean();
  result.mean_pressure.assign(mean_p.data(), mean_p.data() + mean_p.size());
  result.ok = true;
}

}  // namespace

Report run_experiment(const ExperimentConfig& config, const SnapshotMatrix& dataset) {
  config.validate();
  Report report;
  report.dataset_fingerprint = sha256_hex(encode_snapshots(dataset));
  report.config_json = experiment_config_to_json(config);
  report.dt = dataset.dt();
  report.notes = {
      "pressure RMSE is reported over pressure rows only, in scaled units and in Pa",
      "plot traces use the spatial mean of the pressure field",
      "the POD basis is fitted on the training window and reused after retraining on train+validation",
      std::string("inlet input mode: ") + (config.input_mode == InputMode::Folded ? "folded into state" : "inlet (B u)"),
  };
  if (!config.data_path) {
    report.notes.emplace_back("inlet amplitude, period and pressure level are configurable assumptions");
  }
  const bool several = config.feature_sets.size() > 1;

  for (const auto& features : config.feature_sets) {
    const auto prepared = prepare_data(dataset, features, config.split, config.input_mode);
    const auto& test = prepared.split.test;
    const Eigen::Index n_test = test.n_times();
    const std::string feature_label = join(features, "+");

    if (report.test_times.empty()) {
      report.counts = prepared.counts;
      report.test_times = test.times();
      const auto rows = field_rows(test.layout(), kPressureField);
      const Eigen::RowVectorXd mean_p =
          test.raw_values().middleRows(rows.front(), static_cast<Eigen::Index>(rows.size())).colwise().mean();
      report.truth_mean_pressure.assign(mean_p.data(), mean_p.data() + mean_p.size());
    }

    FeatureRun run;
    run.features = feature_label;
    run.n_state = prepared.data.n_rows();
    std::optional<PodBasis> basis;
    try {
      const auto full = fit_basis(prepared.split.train);
      basis = truncate(full, config.rank.resolve(full));
      run.rank = basis->modes.cols();
      run.energy_captured = basis->energy_captured;
      run.basis_fingerprint_fit = basis_fingerprint(*basis);
      try {
        const auto test_full = fit_basis(test);
        if (test_full.modes.cols() >= *run.rank) {
          const auto angles = subspace_shift(*basis, truncate(test_full, *run.rank));
          run.shift_angles_deg.assign(angles.data(), angles.data() + angles.size());
          run.max_shift_deg = angles.maxCoeff();
        }
      } catch (const Error&) {
      }
    } catch (const Error& e) {
      run.basis_error = e.what();
    }

    Eigen::MatrixXd inlet_history;
    if (prepared.input_mode == InputMode::Inlet) inlet_history = prepared.inlet_signal.leftCols(prepared.history.n_times());

    for (const auto& method : config.methods) {
      MethodResult result;
      result.method = method;
      result.features = feature_label;
      result.label = several ? method + "@" + feature_label : method;
      try {
        if (method_needs_basis(method) && !basis) throw FitError("POD basis unavailable: " + run.basis_error);
        const auto model = fit_method(method, prepared, basis ? &*basis : nullptr, config);
        result.fit_seconds = model.fit_seconds;
        result.lambda = model.lambda;
        result.rank = model.rank();
        result.sweep = model.sweep;
        if (model.basis) run.basis_fingerprint_forecast = basis_fingerprint(*model.basis);
        const auto start = Clock::now();
        const auto predicted = forecast(model, prepared.history, n_test, config.block,
                                        inlet_history.size() ? &inlet_history : nullptr);
        result.rollout_seconds = seconds_since(start);
        score(result, predicted, test);
      } catch (const std::exception& e) {
        result.ok = false;
        result.error = e.what();
      }
      report.methods.push_back(std::move(result));
    }

    for (const auto& ext : config.external) {
      MethodResult result;
      result.method = ext.name;
      result.features = feature_label;
      result.label = several ? ext.name + "@" + feature_label : ext.name;
      try {
        const auto bytes = io::read_file(ext.path);
        const auto values = import_external_predictions(
            std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()), test.layout(), n_test);
        score(result, SnapshotMatrix(test.layout(), test.t0(), test.dt(), values), test);
      } catch (const std::exception& e) {
        result.ok = false;
        result.error = e.what();
      }
      report.methods.push_back(std::move(result));
    }
    report.runs.push_back(std::move(run));
  }
  return report;
}

}  // namespace gasrom
