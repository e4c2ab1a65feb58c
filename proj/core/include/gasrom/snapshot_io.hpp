#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gasrom/binary_io.hpp"
#include "gasrom/field_data.hpp"

namespace gasrom {

inline constexpr std::string_view kSnapshotMagic = "SNP1";

// SNP1 layout (little-endian):
//   "SNP1" | u32 n_rows | u32 n_cols | u32 n_fields
//   per field: str16 name | u32 components | u32 points | components x (f64 offset, f64 factor)
//   f64 t0 | f64 dt | n_rows * n_cols f64, column-major
std::vector<std::uint8_t> encode_snapshots(const SnapshotMatrix& data);
SnapshotMatrix decode_snapshots(std::span<const std::uint8_t> bytes);

void write_layout(io::ByteWriter& w, const FieldLayout& layout);
FieldLayout read_layout(io::ByteReader& r);

void save_snapshots(const std::filesystem::path& path, const SnapshotMatrix& data);
SnapshotMatrix load_snapshots(const std::filesystem::path& path);

/// Header cell names "<field>.<component>.<point>" in layout row order.
std::vector<std::string> csv_column_names(const FieldLayout& layout);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

/// `t,<field.component.point>...` header then one row per time step, raw units.
std::string snapshots_to_csv(const SnapshotMatrix& data);
/// Same table shape for an arbitrary raw-valued matrix on a time grid.
std::string matrix_to_csv(const FieldLayout& layout, const std::vector<double>& times, const Eigen::MatrixXd& raw);

struct CsvTable {
  std::vector<std::string> header;  // without the leading "t"
  std::vector<double> times;
  Eigen::MatrixXd values;           // header.size() x times.size()
};

CsvTable parse_csv(std::string_view text);

/// Rebuilds a snapshot matrix (identity scaling) from a CSV whose header
/// encodes the layout.
SnapshotMatrix snapshots_from_csv(std::string_view text);

/// Reads a CSV that must match `layout` column for column. A mismatch names
/// the first offending column.
CsvTable read_csv_for_layout(std::string_view text, const FieldLayout& layout);

}  // namespace gasrom
