#pragma once

// Snapshot data model: field layout, scaling, time-column splitting and the
// Reynolds-number utility.

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gasrom {

/// One named field occupying `components * points` consecutive rows.
/// Rows are component-major, point-minor. Scaling is affine per component
/// block: scaled = (raw - scale_offset[c]) / scale_factor[c].
struct FieldSpec {
  std::string name;
  std::size_t components = 1;
  std::size_t points = 1;
  std::vector<double> scale_offset;
  std::vector<double> scale_factor;

  std::size_t size() const noexcept { return components * points; }
  bool operator==(const FieldSpec&) const = default;
};

/// True for fields produced by algebraic correlations rather than transport
/// equations (k, omega, nut).
bool is_synthetic_field(std::string_view name);

class FieldLayout {
 public:
  FieldLayout() = default;
  /// Validates names, sizes and scale factors. Empty scale vectors are
  /// filled with the identity scaling.
  explicit FieldLayout(std::vector<FieldSpec> fields);

  const std::vector<FieldSpec>& fields() const noexcept { return fields_; }
  std::size_t n_state() const noexcept { return n_state_; }
  bool empty() const noexcept { return fields_.empty(); }

  const FieldSpec* find(std::string_view name) const;
  const FieldSpec& at(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  /// First row occupied by `name`.
  std::size_t row_offset(std::string_view name) const;
  std::size_t row(std::size_t field, std::size_t component, std::size_t point) const;

  std::vector<std::string> names() const;
  bool operator==(const FieldLayout&) const = default;

 private:
  std::vector<FieldSpec> fields_;
  std::vector<std::size_t> offsets_;
  std::size_t n_state_ = 0;
};

/// Column-per-time-step matrix in scaled units. Columns sit on a uniform
/// time grid t0 + k * dt.
class SnapshotMatrix {
 public:
  SnapshotMatrix() = default;
  SnapshotMatrix(FieldLayout layout, double t0, double dt, Eigen::MatrixXd values);

  const FieldLayout& layout() const noexcept { return layout_; }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  Eigen::Index n_rows() const noexcept { return values_.rows(); }
  Eigen::Index n_times() const noexcept { return values_.cols(); }
  double t0() const noexcept { return t0_; }
  double dt() const noexcept { return dt_; }
  double time(Eigen::Index k) const noexcept { return t0_ + static_cast<double>(k) * dt_; }
  std::vector<double> times() const;

  /// Values with the layout's scaling undone.
  Eigen::MatrixXd raw_values() const;
  /// Contiguous column range [start, start + count).
  SnapshotMatrix columns(Eigen::Index start, Eigen::Index count) const;

 private:
  FieldLayout layout_;
  double t0_ = 0.0;
  double dt_ = 1.0;
  Eigen::MatrixXd values_;
};

/// Unscaled values of one field, (components * points) x n_times.
struct RawField {
  std::string name;
  std::size_t components = 1;
  std::size_t points = 1;
  Eigen::MatrixXd values;
};

struct ScalingPolicy {
  enum class Kind { Identity, Standardize };
  Kind kind = Kind::Identity;
  /// Statistics are taken over the leading `fit_columns` columns (all when unset).
  std::optional<Eigen::Index> fit_columns;

  static ScalingPolicy identity() { return {}; }
  static ScalingPolicy standardize(std::optional<Eigen::Index> fit_columns = std::nullopt) {
    return {Kind::Standardize, fit_columns};
  }
};

SnapshotMatrix assemble_snapshots(std::span<const RawField> fields, std::span<const double> times,
                                  const ScalingPolicy& scaling);
std::vector<RawField> disassemble(const SnapshotMatrix& data);

/// Recomputes scaling from the raw values under a new policy.
SnapshotMatrix rescale(const SnapshotMatrix& data, const ScalingPolicy& scaling);

/// Keeps the named fields, in the given order, with their current scaling.
SnapshotMatrix select_fields(const SnapshotMatrix& data, std::span<const std::string> names);

/// Re-expresses `data` in `target`'s field order and scaling. Field shapes
/// must match by name.
SnapshotMatrix conform_to(const SnapshotMatrix& data, const FieldLayout& target);

/// Applies the layout's scaling to raw values.
Eigen::MatrixXd scale_values(const FieldLayout& layout, const Eigen::MatrixXd& raw);
Eigen::MatrixXd unscale_values(const FieldLayout& layout, const Eigen::MatrixXd& scaled);

/// Column concatenation; `b` must continue `a`'s time grid.
SnapshotMatrix concat_columns(const SnapshotMatrix& a, const SnapshotMatrix& b);

struct SplitRatios {
  double train = 0.5;
  double validation = 0.1;
  double test = 0.4;
};

struct SplitCounts {
  Eigen::Index train = 0;
  Eigen::Index validation = 0;
  Eigen::Index test = 0;
};

struct DataSplit {
  SnapshotMatrix train;
  SnapshotMatrix validation;
  SnapshotMatrix test;
};

/// floor(ratio * n) for train and validation, the remainder to test.
SplitCounts split_counts(Eigen::Index n, const SplitRatios& ratios);
DataSplit split_sequences(const SnapshotMatrix& data, const SplitRatios& ratios = {});

struct FluidProperties {
  double density = 0.0838;             // kg/m^3, hydrogen near ambient
  double dynamic_viscosity = 8.9e-6;   // Pa s
  double sound_speed = 1300.0;         // m/s, isothermal closure p = a^2 rho

  void validate() const;
};

struct PipeGeometry {
  double diameter = 0.0762;  // m
  double length = 5.0;       // m

  void validate() const;
};

inline constexpr double kTurbulentReynolds = 2900.0;

struct ReynoldsNumber {
  double value = 0.0;
  bool turbulent = false;
};

/// Re = rho u D / mu; turbulent iff Re > 2900.
ReynoldsNumber reynolds(const FluidProperties& fluid, double speed, const PipeGeometry& geometry);

/// Inverse of reynolds(): the bulk speed that yields `re`.
double speed_for_reynolds(const FluidProperties& fluid, const PipeGeometry& geometry, double re);

}  // namespace gasrom
