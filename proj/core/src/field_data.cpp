#include "gasrom/field_data.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gasrom/error.hpp"

namespace gasrom {

namespace {

constexpr double kMinScale = 1e-14;

void check_finite(const Eigen::MatrixXd& m, const std::string& what) {
  if (!m.allFinite()) throw DataError(what + " contains non-finite values");
}

/// Fills scale_offset/scale_factor of every field from the raw values.
void fit_scaling(std::vector<FieldSpec>& specs, const Eigen::MatrixXd& raw, const ScalingPolicy& policy) {
  const Eigen::Index cols = policy.fit_columns ? *policy.fit_columns : raw.cols();
  if (policy.kind == ScalingPolicy::Kind::Standardize && (cols < 1 || cols > raw.cols())) {
    throw DimensionError("scaling fit_columns " + std::to_string(cols) + " outside [1, " +
                         std::to_string(raw.cols()) + "]");
  }
  Eigen::Index row = 0;
  for (auto& f : specs) {
    f.scale_offset.assign(f.components, 0.0);
    f.scale_factor.assign(f.components, 1.0);
    for (std::size_t c = 0; c < f.components; ++c) {
      const auto n = static_cast<Eigen::Index>(f.points);
      if (policy.kind == ScalingPolicy::Kind::Standardize) {
        const auto block = raw.block(row, 0, n, cols);
        const double mean = block.mean();
        const double var = (block.array() - mean).square().mean();
        double scale = std::sqrt(var);
        if (scale < kMinScale) scale = block.cwiseAbs().maxCoeff();
        if (scale < kMinScale) scale = 1.0;
        f.scale_offset[c] = mean;
        f.scale_factor[c] = scale;
      }
      row += n;
    }
  }
}

}  // namespace

bool is_synthetic_field(std::string_view name) { return name == "k" || name == "omega" || name == "nut"; }

FieldLayout::FieldLayout(std::vector<FieldSpec> fields) : fields_(std::move(fields)) {
  std::set<std::string> seen;
  for (auto& f : fields_) {
    if (f.name.empty()) throw ConfigError("field name must not be empty");
    if (!seen.insert(f.name).second) throw ConfigError("duplicate field name '" + f.name + "'");
    if (f.components == 0 || f.points == 0) {
      throw DimensionError("field '" + f.name + "' must have positive components and points");
    }
    if (f.scale_offset.empty()) f.scale_offset.assign(f.components, 0.0);
    if (f.scale_factor.empty()) f.scale_factor.assign(f.components, 1.0);
    if (f.scale_offset.size() != f.components || f.scale_factor.size() != f.components) {
      throw DimensionError("field '" + f.name + "' needs one scale pair per component");
    }
    for (double s : f.scale_factor) {
      if (!(s > 0.0) || !std::isfinite(s)) throw DataError("field '" + f.name + "' has non-positive scale factor");
    }
    for (double o : f.scale_offset) {
      if (!std::isfinite(o)) throw DataError("field '" + f.name + "' has non-finite scale offset");
    }
    offsets_.push_back(n_state_);
    n_state_ += f.size();
  }
}

const FieldSpec* FieldLayout::find(std::string_view name) const {
  auto it = std::find_if(fields_.begin(), fields_.end(), [&](const FieldSpec& f) { return f.name == name; });
  return it == fields_.end() ? nullptr : &*it;
}

const FieldSpec& FieldLayout::at(std::string_view name) const {
  if (const auto* f = find(name)) return *f;
  throw ConfigError("field '" + std::string(name) + "' not present in layout");
}

std::size_t FieldLayout::row_offset(std::string_view name) const {
  const auto& f = at(name);
  return offsets_[static_cast<std::size_t>(&f - fields_.data())];
}

std::size_t FieldLayout::row(std::size_t field, std::size_t component, std::size_t point) const {
  const auto& f = fields_.at(field);
  return offsets_[field] + component * f.points + point;
}

std::vector<std::string> FieldLayout::names() const {
  std::vector<std::string> out;
  for (const auto& f : fields_) out.push_back(f.name);
  return out;
}

SnapshotMatrix::SnapshotMatrix(FieldLayout layout, double t0, double dt, Eigen::MatrixXd values)
    : layout_(std::move(layout)), t0_(t0), dt_(dt), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.rows()) != layout_.n_state()) {
    throw DimensionError("snapshot has " + std::to_string(values_.rows()) + " rows but layout describes " +
                         std::to_string(layout_.n_state()));
  }
  if (!(dt_ > 0.0) || !std::isfinite(dt_) || !std::isfinite(t0_)) {
    throw DataError("snapshot time grid needs finite t0 and dt > 0");
  }
}

std::vector<double> SnapshotMatrix::times() const {
  std::vector<double> t(static_cast<std::size_t>(n_times()));
  for (Eigen::Index k = 0; k < n_times(); ++k) t[static_cast<std::size_t>(k)] = time(k);
  return t;
}

Eigen::MatrixXd SnapshotMatrix::raw_values() const { return unscale_values(layout_, values_); }

SnapshotMatrix SnapshotMatrix::columns(Eigen::Index start, Eigen::Index count) const {
  if (start < 0 || count < 0 || start + count > n_times()) {
    throw DimensionError("column range [" + std::to_string(start) + ", " + std::to_string(start + count) +
                         ") outside " + std::to_string(n_times()) + " columns");
  }
  return {layout_, time(start), dt_, values_.middleCols(start, count)};
}

Eigen::MatrixXd scale_values(const FieldLayout& layout, const Eigen::MatrixXd& raw) {
  if (static_cast<std::size_t>(raw.rows()) != layout.n_state()) throw DimensionError("scale_values: row mismatch");
  Eigen::MatrixXd out(raw.rows(), raw.cols());
  Eigen::Index row = 0;
  for (const auto& f : layout.fields()) {
    const auto n = static_cast<Eigen::Index>(f.points);
    for (std::size_t c = 0; c < f.components; ++c, row += n) {
      out.middleRows(row, n) = (raw.middleRows(row, n).array() - f.scale_offset[c]) / f.scale_factor[c];
    }
  }
  return out;
}

Eigen::MatrixXd unscale_values(const FieldLayout& layout, const Eigen::MatrixXd& scaled) {
  if (static_cast<std::size_t>(scaled.rows()) != layout.n_state()) {
    throw DimensionError("unscale_values: row mismatch");
  }
  Eigen::MatrixXd out(scaled.rows(), scaled.cols());
  Eigen::Index row = 0;
  for (const auto& f : layout.fields()) {
    const auto n = static_cast<Eigen::Index>(f.points);
    for (std::size_t c = 0; c < f.components; ++c, row += n) {
      out.middleRows(row, n) = scaled.middleRows(row, n).array() * f.scale_factor[c] + f.scale_offset[c];
    }
  }
  return out;
}

SnapshotMatrix assemble_snapshots(std::span<const RawField> fields, std::span<const double> times,
                                  const ScalingPolicy& scaling) {
  if (fields.empty()) throw DimensionError("assemble_snapshots: no fields selected");
  if (times.size() < 2) throw DimensionError("assemble_snapshots: need at least two time points");
  for (double t : times) {
    if (!std::isfinite(t)) throw DataError("assemble_snapshots: non-finite time");
  }
  const auto n_times = static_cast<Eigen::Index>(times.size());
  const double dt = (times.back() - times.front()) / static_cast<double>(n_times - 1);
  if (!(dt > 0.0)) throw DataError("assemble_snapshots: times must be strictly increasing");
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double step = times[k] - times[k - 1];
    const double tol = 1e-12 * std::max(std::abs(dt), std::abs(times[k]));
    if (!(step > 0.0) || std::abs(step - dt) > tol) {
      throw DataError("assemble_snapshots: time spacing not uniform at index " + std::to_string(k));
    }
  }

  std::vector<FieldSpec> specs;
  std::size_t n_state = 0;
  for (const auto& f : fields) {
    if (f.values.rows() != static_cast<Eigen::Index>(f.components * f.points)) {
      throw DimensionError("field '" + f.name + "' has " + std::to_string(f.values.rows()) + " rows, expected " +
                           std::to_string(f.components * f.points));
    }
    if (f.values.cols() != n_times) {
      throw DimensionError("field '" + f.name + "' has " + std::to_string(f.values.cols()) + " time steps, expected " +
                           std::to_string(n_times));
    }
    check_finite(f.values, "field '" + f.name + "'");
    specs.push_back({f.name, f.components, f.points, {}, {}});
    n_state += f.components * f.points;
  }

  Eigen::MatrixXd raw(static_cast<Eigen::Index>(n_state), n_times);
  Eigen::Index row = 0;
  for (const auto& f : fields) {
    raw.middleRows(row, f.values.rows()) = f.values;
    row += f.values.rows();
  }
  fit_scaling(specs, raw, scaling);
  FieldLayout layout(std::move(specs));
  auto scaled = scale_values(layout, raw);
  return {std::move(layout), times.front(), dt, std::move(scaled)};
}

std::vector<RawField> disassemble(const SnapshotMatrix& data) {
  const auto raw = data.raw_values();
  std::vector<RawField> out;
  Eigen::Index row = 0;
  for (const auto& f : data.layout().fields()) {
    const auto n = static_cast<Eigen::Index>(f.size());
    out.push_back({f.name, f.components, f.points, raw.middleRows(row, n)});
    row += n;
  }
  return out;
}

SnapshotMatrix rescale(const SnapshotMatrix& data, const ScalingPolicy& scaling) {
  auto specs = data.layout().fields();
  const auto raw = data.raw_values();
  fit_scaling(specs, raw, scaling);
  FieldLayout layout(std::move(specs));
  auto scaled = scale_values(layout, raw);
  return {std::move(layout), data.t0(), data.dt(), std::move(scaled)};
}

SnapshotMatrix select_fields(const SnapshotMatrix& data, std::span<const std::string> names) {
  if (names.empty()) throw ConfigError("select_fields: empty field selection");
  std::vector<FieldSpec> specs;
  std::size_t n_state = 0;
  for (const auto& name : names) {
    specs.push_back(data.layout().at(name));
    n_state += specs.back().size();
  }
  Eigen::MatrixXd values(static_cast<Eigen::Index>(n_state), data.n_times());
  Eigen::Index row = 0;
  for (const auto& f : specs) {
    const auto n = static_cast<Eigen::Index>(f.size());
    values.middleRows(row, n) = data.values().middleRows(static_cast<Eigen::Index>(data.layout().row_offset(f.name)), n);
    row += n;
  }
  return {FieldLayout(std::move(specs)), data.t0(), data.dt(), std::move(values)};
}

SnapshotMatrix conform_to(const SnapshotMatrix& data, const FieldLayout& target) {
  const auto names = target.names();
  for (const auto& f : target.fields()) {
    const auto& have = data.layout().at(f.name);
    if (have.components != f.components || have.points != f.points) {
      throw DimensionError("field '" + f.name + "' shape " + std::to_string(have.components) + "x" +
                           std::to_string(have.points) + " does not match expected " + std::to_string(f.components) +
                           "x" + std::to_string(f.points));
    }
  }
  const auto picked = select_fields(data, names);
  auto scaled = scale_values(target, picked.raw_values());
  return {target, data.t0(), data.dt(), std::move(scaled)};
}

SnapshotMatrix concat_columns(const SnapshotMatrix& a, const SnapshotMatrix& b) {
  if (!(a.layout() == b.layout())) throw DimensionError("concat_columns: layouts differ");
  if (a.n_times() == 0) return b;
  if (b.n_times() == 0) return a;
  const double expected = a.time(a.n_times());
  if (std::abs(b.t0() - expected) > 1e-9 * std::max(a.dt(), std::abs(expected)) ||
      std::abs(a.dt() - b.dt()) > 1e-12 * a.dt()) {
    throw DataError("concat_columns: second block does not continue the time grid");
  }
  Eigen::MatrixXd values(a.n_rows(), a.n_times() + b.n_times());
  values << a.values(), b.values();
  return {a.layout(), a.t0(), a.dt(), std::move(values)};
}

SplitCounts split_counts(Eigen::Index n, const SplitRatios& ratios) {
  if (!(ratios.train > 0.0 && ratios.validation > 0.0 && ratios.test > 0.0)) {
    throw ConfigError("split ratios must be positive");
  }
  if (std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-12) {
    throw ConfigError("split ratios must sum to 1");
  }
  if (n < 10) throw DimensionError("split needs at least 10 columns, got " + std::to_string(n));
  // The small guard keeps products such as 0.1 * 10 from flooring to 0.
  const auto take = [n](double r) {
    return static_cast<Eigen::Index>(std::floor(r * static_cast<double>(n) + 1e-9));
  };
  SplitCounts c;
  c.train = take(ratios.train);
  c.validation = take(ratios.validation);
  c.test = n - c.train - c.validation;
  if (c.train < 1 || c.validation < 1 || c.test < 1) throw DimensionError("split leaves an empty partition");
  return c;
}

DataSplit split_sequences(const SnapshotMatrix& data, const SplitRatios& ratios) {
  const auto c = split_counts(data.n_times(), ratios);
  return {data.columns(0, c.train), data.columns(c.train, c.validation),
          data.columns(c.train + c.validation, c.test)};
}

void FluidProperties::validate() const {
  if (!(density > 0.0) || !(dynamic_viscosity > 0.0) || !(sound_speed > 0.0)) {
    throw DomainError("fluid properties must be strictly positive");
  }
}

void PipeGeometry::validate() const {
  if (!(diameter > 0.0) || !(length > 0.0)) throw DomainError("pipe diameter and length must be positive");
}

ReynoldsNumber reynolds(const FluidProperties& fluid, double speed, const PipeGeometry& geometry) {
  fluid.validate();
  geometry.validate();
  if (!(speed > 0.0)) throw DomainError("reynolds: flow speed must be positive");
  const double re = fluid.density * speed * geometry.diameter / fluid.dynamic_viscosity;
  return {re, re > kTurbulentReynolds};
}

double speed_for_reynolds(const FluidProperties& fluid, const PipeGeometry& geometry, double re) {
  fluid.validate();
  geometry.validate();
  if (!(re > 0.0)) throw DomainError("speed_for_reynolds: Reynolds number must be positive");
  return re * fluid.dynamic_viscosity / (fluid.density * geometry.diameter);
}

}  // namespace gasrom
