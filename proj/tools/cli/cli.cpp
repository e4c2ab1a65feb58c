#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gasrom/bench.hpp"
#include "gasrom/config_io.hpp"
#include "gasrom/error.hpp"
#include "gasrom/model_io.hpp"
#include "gasrom/report_io.hpp"
#include "gasrom/snapshot_io.hpp"

namespace gasrom::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::string out;
  std::string data;
  std::string model;
  long steps = -1;
  std::vector<std::string> overrides;
  std::string format = "snp1";
  std::string file;
};

std::string text_of(const fs::path& path) {
  const auto bytes = io::read_file(path);
  return {bytes.begin(), bytes.end()};
}

ExperimentConfig load_config(const Options& opt) {
  const std::string text = opt.config.empty() ? std::string() : text_of(opt.config);
  return parse_experiment_config(text, opt.overrides);
}

SnapshotMatrix load_data(const fs::path& path) {
  if (path.extension() == ".csv") return snapshots_from_csv(text_of(path));
  return load_snapshots(path);
}

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string describe_layout(const FieldLayout& layout) {
  std::string s;
  for (const auto& f : layout.fields()) {
    if (!s.empty()) s += ", ";
    s += f.name + "[" + std::to_string(f.components) + "x" + std::to_string(f.points) + "]";
    if (is_synthetic_field(f.name)) s += " (synthetic)";
  }
  return s;
}

int cmd_datagen(const Options& opt, std::ostream& out) {
  if (opt.out.empty()) throw ConfigError("datagen: --out is required");
  if (opt.format != "snp1" && opt.format != "csv") throw ConfigError("--format must be snp1 or csv");
  auto config = load_config(opt);
  config.data_path.reset();
  auto data = resolve_dataset(config);
  const auto counts = split_counts(data.n_times(), config.split);
  data = rescale(data, ScalingPolicy::standardize(counts.train));
  if (opt.format == "csv") {
    io::write_file_atomic(opt.out, snapshots_to_csv(data));
  } else {
    io::write_file_atomic(opt.out, encode_snapshots(data));
  }
  const auto re = reynolds(config.solver.fluid, config.inlet.base_velocity, config.solver.geometry);
  out << "n_rows=" << data.n_rows() << " n_cols=" << data.n_times()
      << " duration=" << fmt(static_cast<double>(data.n_times()) * data.dt()) << " s"
      << " Re=" << fmt(re.value, "%.2f") << " turbulent=" << (re.turbulent ? "true" : "false") << "\n";
  out << "fields: " << describe_layout(data.layout()) << "\n";
  return 0;
}

PreparedData prepare_for_fit(const ExperimentConfig& config, const SnapshotMatrix& data) {
  return prepare_data(data, config.feature_sets.front(), config.split, config.input_mode);
}

int cmd_fit(const Options& opt, std::ostream& out) {
  if (opt.out.empty()) throw ConfigError("fit: --out is required");
  auto config = load_config(opt);
  if (!opt.data.empty()) config.data_path = opt.data;
  if (config.methods.empty()) throw ConfigError("fit: bench.methods is empty");
  const std::string method = config.methods.front();
  const auto data = config.data_path ? load_data(*config.data_path) : resolve_dataset(config);
  const auto prepared = prepare_for_fit(config, data);

  std::optional<PodBasis> basis;
  if (method_needs_basis(method)) {
    const auto full = fit_basis(prepared.split.train);
    basis = truncate(full, config.rank.resolve(full));
  }
  const auto model = fit_method(method, prepared, basis ? &*basis : nullptr, config);
  save_model(opt.out, model);
  out << "method=" << model.method;
  if (model.rank()) out << " rank=" << *model.rank();
  if (model.lambda) out << " lambda=" << fmt(*model.lambda);
  if (basis) out << " energy=" << fmt(basis->energy_captured, "%.6f");
  out << " train=" << prepared.counts.train << " validation=" << prepared.counts.validation
      << " fit_s=" << fmt(model.fit_seconds, "%.3f") << "\n";
  return 0;
}

int cmd_predict(const Options& opt, std::ostream& out) {
  if (opt.model.empty()) throw ConfigError("predict: --model is required");
  if (opt.data.empty()) throw ConfigError("predict: --data is required");
  if (opt.out.empty()) throw ConfigError("predict: --out is required");
  if (opt.steps < 0) throw ConfigError("predict: --steps must be given and non-negative");
  const auto model = load_model(opt.model);
  const auto data = load_data(opt.data);

  const auto names = model.layout.names();
  const auto history = conform_to(select_fields(data, names), model.layout);
  Eigen::MatrixXd inlet;
  if (model.input_mode == InputMode::Inlet) {
    const std::vector<std::string> u{"U"};
    inlet = conform_to(select_fields(data, u), model.input_layout).values().topRows(1);
  }
  const auto start = std::chrono::steady_clock::now();
  const auto predicted = forecast(model, history, opt.steps, 10, inlet.size() ? &inlet : nullptr);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  io::write_file_atomic(opt.out, matrix_to_csv(predicted.layout(), predicted.times(), predicted.raw_values()));
  out << "steps=" << opt.steps << " rollout_s=" << fmt(seconds, "%.6f") << "\n";
  return 0;
}

int cmd_bench(const Options& opt, std::ostream& out) {
  if (opt.out.empty()) throw ConfigError("bench: --out <directory> is required");
  auto config = load_config(opt);
  if (!opt.data.empty()) config.data_path = opt.data;
  const auto report = run_experiment(config);

  const fs::path dir = opt.out;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  io::write_file_atomic(dir / "summary.csv", report_summary_csv(report));
  io::write_file_atomic(dir / "plot.csv", report_plot_csv(report));
  io::write_file_atomic(dir / "report.json", report_to_json(report));

  for (const auto& run : report.runs) {
    out << "features=" << run.features << " n_state=" << run.n_state;
    if (run.rank) out << " rank=" << *run.rank << " energy=" << fmt(run.energy_captured, "%.6f");
    if (run.max_shift_deg) out << " max_shift_deg=" << fmt(*run.max_shift_deg, "%.3f");
    if (!run.basis_error.empty()) out << " basis_error=\"" << run.basis_error << "\"";
    out << "\n";
  }
  for (const auto& m : report.methods) {
    out << m.label;
    if (m.ok) {
      out << " rmse_pa=" << fmt(m.rmse_pa) << " rmse_scaled=" << fmt(m.rmse_scaled)
          << " fit_s=" << fmt(m.fit_seconds, "%.3f") << " rollout_s=" << fmt(m.rollout_seconds, "%.4f");
      if (m.lambda) out << " lambda=" << fmt(*m.lambda);
    } else {
      out << " FAILED: " << m.error;
    }
    out << "\n";
  }
  out << "report_hash=" << report_content_hash(report) << "\n";
  return 0;
}

void inspect_snapshots(const SnapshotMatrix& data, std::ostream& out) {
  out << "container: SNP1 snapshot matrix\n";
  out << "rows: " << data.n_rows() << "  columns: " << data.n_times() << "\n";
  out << "t0: " << fmt(data.t0()) << " s  dt: " << fmt(data.dt()) << " s\n";
  out << "layout: " << describe_layout(data.layout()) << "\n";
}

void inspect_basis(const PodBasis& basis, std::ostream& out) {
  out << "container: POD1 basis\n";
  out << "n_state: " << basis.n_state() << "  rank: " << basis.modes.cols()
      << "  spectrum length: " << basis.singular_values.size() << "\n";
  out << "sigma head:";
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(8, basis.singular_values.size()); ++i) {
    out << " " << fmt(basis.singular_values[i]);
  }
  out << "\n";
  const Eigen::Index r30 = std::min<Eigen::Index>(kDefaultMaxRank, basis.singular_values.size());
  const double e30 = cumulative_energy(basis.singular_values, r30);
  out << "energy at r=" << r30 << ": " << fmt(e30, "%.6f") << " (threshold " << fmt(kDefaultEnergyThreshold, "%.4f")
      << ", " << (e30 >= kDefaultEnergyThreshold ? "met" : "not met") << ")\n";
  out << "rank for threshold: " << select_rank(basis.singular_values, kDefaultEnergyThreshold) << "\n";
  if (!basis.layout.empty()) out << "layout: " << describe_layout(basis.layout) << "\n";
}

void inspect_operators(const ReducedOperators& ops, std::ostream& out) {
  out << "container: OPI1 reduced operators\n";
  out << "rank: " << ops.rank << "  inputs: " << ops.input_width << "  terms: " << ops.ops.letters()
      << "  lambda: " << fmt(ops.lambda) << "  dt: " << fmt(ops.dt) << "\n";
}

int cmd_inspect(const Options& opt, std::ostream& out) {
  const std::string path = !opt.file.empty() ? opt.file : opt.data;
  if (path.empty()) throw ConfigError("inspect: a file argument is required");
  const auto bytes = io::read_file(path);
  io::ByteReader probe(bytes, path);
  const auto magic = probe.peek_magic();
  if (magic == "SNP1") {
    inspect_snapshots(decode_snapshots(bytes), out);
  } else if (magic == "POD1") {
    io::ByteReader r(bytes, path);
    inspect_basis(read_pod(r), out);
  } else if (magic == "OPI1") {
    io::ByteReader r(bytes, path);
    inspect_operators(read_operators(r), out);
  } else if (magic == "ARM1") {
    io::ByteReader r(bytes, path);
    const auto ar = read_ar_model(r);
    out << "container: ARM1 linear autoregressive model\n";
    out << "rank: " << ar.rank << "  lambda: " << fmt(ar.lambda) << "  dt: " << fmt(ar.dt) << "\n";
  } else if (magic == "MDL1") {
    const auto model = decode_model(bytes);
    out << "container: MDL1 model bundle\n";
    out << "method: " << model.method << "  input mode: " << (model.input_mode == InputMode::Inlet ? "inlet" : "folded");
    if (model.lambda) out << "  lambda: " << fmt(*model.lambda);
    if (model.rank()) out << "  rank: " << *model.rank();
    out << "\nlayout: " << describe_layout(model.layout) << "\n";
    if (model.basis) inspect_basis(*model.basis, out);
    if (model.opinf) inspect_operators(*model.opinf, out);
  } else {
    throw FormatError(path + ": unknown magic '" + magic + "' (expected SNP1, POD1, OPI1, ARM1 or MDL1)");
  }
  return 0;
}

void add_common(CLI::App* sub, Options& opt, bool data, bool config) {
  if (config) {
    sub->add_option("--config", opt.config, "JSON experiment config");
    sub->add_option("--override,--overrides", opt.overrides, "dotted.key=value, applied before validation")
        ->allow_extra_args(false);
  }
  if (data) sub->add_option("--data", opt.data, "snapshot file (SNP1 or .csv)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"gasrom: pipeline pressure reduced-order modeling"};
  app.require_subcommand(1);
  Options opt;

  auto* datagen = app.add_subcommand("datagen", "run the surrogate solver and write a snapshot file");
  add_common(datagen, opt, false, true);
  datagen->add_option("--out", opt.out, "output path");
  datagen->add_option("--format", opt.format, "snp1 or csv")->check(CLI::IsMember({"snp1", "csv"}));

  auto* fit = app.add_subcommand("fit", "fit bench.methods[0] and write a model bundle");
  add_common(fit, opt, true, true);
  fit->add_option("--out", opt.out, "bundle path");

  auto* predict = app.add_subcommand("predict", "forecast past the end of a snapshot file");
  add_common(predict, opt, true, false);
  predict->add_option("--model", opt.model, "model bundle");
  predict->add_option("--steps", opt.steps, "number of steps");
  predict->add_option("--out", opt.out, "forecast CSV");

  auto* bench = app.add_subcommand("bench", "run the benchmark and write summary.csv, plot.csv, report.json");
  add_common(bench, opt, true, true);
  bench->add_option("--out", opt.out, "output directory");

  auto* inspect = app.add_subcommand("inspect", "summarize a container file");
  inspect->add_option("file", opt.file, "SNP1, POD1, OPI1, ARM1 or MDL1 file");
  add_common(inspect, opt, true, false);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::Config);
  }

  try {
    if (datagen->parsed()) return cmd_datagen(opt, out);
    if (fit->parsed()) return cmd_fit(opt, out);
    if (predict->parsed()) return cmd_predict(opt, out);
    if (bench->parsed()) return cmd_bench(opt, out);
    return cmd_inspect(opt, out);
  } catch (const RolloutDivergenceError& e) {
    err << "error: " << e.what() << " (step " << e.step() << ")\n";
    return static_cast<int>(e.kind());
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::Config);
  }
}

}  // namespace gasrom::cli
