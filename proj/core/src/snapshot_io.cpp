#include "gasrom/snapshot_io.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "gasrom/error.hpp"

namespace gasrom {

void write_layout(io::ByteWriter& w, const FieldLayout& layout) {
  w.u32(static_cast<std::uint32_t>(layout.fields().size()));
  for (const auto& f : layout.fields()) {
    w.str16(f.name);
    w.u32(static_cast<std::uint32_t>(f.components));
    w.u32(static_cast<std::uint32_t>(f.points));
    for (std::size_t c = 0; c < f.components; ++c) {
      w.f64(f.scale_offset[c]);
      w.f64(f.scale_factor[c]);
    }
  }
}

FieldLayout read_layout(io::ByteReader& r) {
  const auto n_fields = r.u32();
  std::vector<FieldSpec> specs;
  for (std::uint32_t i = 0; i < n_fields; ++i) {
    FieldSpec f;
    f.name = r.str16();
    f.components = r.u32();
    f.points = r.u32();
    r.require(f.components * 16);
    for (std::size_t c = 0; c < f.components; ++c) {
      f.scale_offset.push_back(r.f64());
      f.scale_factor.push_back(r.f64());
    }
    specs.push_back(std::move(f));
  }
  return FieldLayout(std::move(specs));
}

std::vector<std::uint8_t> encode_snapshots(const SnapshotMatrix& data) {
  io::ByteWriter w;
  w.magic(kSnapshotMagic);
  w.u32(static_cast<std::uint32_t>(data.n_rows()));
  w.u32(static_cast<std::uint32_t>(data.n_times()));
  write_layout(w, data.layout());
  w.f64(data.t0());
  w.f64(data.dt());
  w.f64s(std::span(data.values().data(), static_cast<std::size_t>(data.values().size())));
  return w.release();
}

SnapshotMatrix decode_snapshots(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes, "SNP1 file");
  r.expect_magic(kSnapshotMagic);
  const auto n_rows = r.u32();
  const auto n_cols = r.u32();
  auto layout = read_layout(r);
  if (layout.n_state() != n_rows) {
    throw FormatError("SNP1 header declares " + std::to_string(n_rows) + " rows but fields describe " +
                      std::to_string(layout.n_state()));
  }
  const double t0 = r.f64();
  const double dt = r.f64();
  Eigen::MatrixXd values(n_rows, n_cols);
  r.f64s(std::span(values.data(), static_cast<std::size_t>(values.size())));
  if (r.remaining() != 0) {
    throw FormatError("SNP1 file has " + std::to_string(r.remaining()) + " trailing bytes");
  }
  return {std::move(layout), t0, dt, std::move(values)};
}

void save_snapshots(const std::filesystem::path& path, const SnapshotMatrix& data) {
  io::write_file_atomic(path, encode_snapshots(data));
}

SnapshotMatrix load_snapshots(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  return decode_snapshots(bytes);
}

std::vector<std::string> csv_column_names(const FieldLayout& layout) {
  std::vector<std::string> names;
  names.reserve(layout.n_state());
  for (const auto& f : layout.fields()) {
    for (std::size_t c = 0; c < f.components; ++c) {
      for (std::size_t p = 0; p < f.points; ++p) {
        names.push_back(f.name + "." + std::to_string(c) + "." + std::to_string(p));
      }
    }
  }
  return names;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string matrix_to_csv(const FieldLayout& layout, const std::vector<double>& times, const Eigen::MatrixXd& raw) {
  if (static_cast<Eigen::Index>(times.size()) != raw.cols() ||
      static_cast<std::size_t>(raw.rows()) != layout.n_state()) {
    throw DimensionError("matrix_to_csv: shape does not match layout/time grid");
  }
  std::string out = "t";
  for (const auto& name : csv_column_names(layout)) {
    out += ',';
    out += name;
  }
  out += '\n';
  for (Eigen::Index k = 0; k < raw.cols(); ++k) {
    out += format_double(times[static_cast<std::size_t>(k)]);
    for (Eigen::Index i = 0; i < raw.rows(); ++i) {
      out += ',';
      out += format_double(raw(i, k));
    }
    out += '\n';
  }
  return out;
}

std::string snapshots_to_csv(const SnapshotMatrix& data) {
  return matrix_to_csv(data.layout(), data.times(), data.raw_values());
}

namespace {

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    cells.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

double parse_number(std::string_view cell, std::size_t row, std::size_t col) {
  while (!cell.empty() && (cell.front() == ' ')) cell.remove_prefix(1);
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\r')) cell.remove_suffix(1);
  double v = 0.0;
  auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
    throw FormatError("CSV row " + std::to_string(row) + " column " + std::to_string(col) + ": cannot parse '" +
                      std::string(cell) + "' as a number");
  }
  return v;
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto pos = text.find('\n', start);
    auto line = text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (lines.empty()) throw FormatError("CSV is empty");
  const auto head = split_line(lines.front());
  if (head.front() != "t") throw FormatError("CSV header column 0 is '" + std::string(head.front()) + "', expected 't'");

  CsvTable table;
  for (std::size_t i = 1; i < head.size(); ++i) table.header.emplace_back(head[i]);
  table.values.resize(static_cast<Eigen::Index>(table.header.size()), static_cast<Eigen::Index>(lines.size() - 1));
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split_line(lines[r]);
    if (cells.size() != head.size()) {
      throw FormatError("CSV row " + std::to_string(r) + " has " + std::to_string(cells.size()) + " cells, header has " +
                        std::to_string(head.size()));
    }
    table.times.push_back(parse_number(cells[0], r, 0));
    for (std::size_t c = 1; c < cells.size(); ++c) {
      table.values(static_cast<Eigen::Index>(c - 1), static_cast<Eigen::Index>(r - 1)) = parse_number(cells[c], r, c);
    }
  }
  return table;
}

SnapshotMatrix snapshots_from_csv(std::string_view text) {
  auto table = parse_csv(text);
  // Recover the layout from "<field>.<component>.<point>" names, keeping
  // first-appearance field order.
  std::vector<std::string> order;
  std::map<std::string, std::pair<std::size_t, std::size_t>> extent;
  for (const auto& name : table.header) {
    const auto p2 = name.rfind('.');
    const auto p1 = p2 == std::string::npos || p2 == 0 ? std::string::npos : name.rfind('.', p2 - 1);
    if (p1 == std::string::npos) throw FormatError("CSV column '" + name + "' is not <field>.<component>.<point>");
    const auto field = name.substr(0, p1);
    std::size_t comp = 0, point = 0;
    const auto c_str = name.substr(p1 + 1, p2 - p1 - 1);
    const auto p_str = name.substr(p2 + 1);
    if (std::from_chars(c_str.data(), c_str.data() + c_str.size(), comp).ptr != c_str.data() + c_str.size() ||
        std::from_chars(p_str.data(), p_str.data() + p_str.size(), point).ptr != p_str.data() + p_str.size() ||
        c_str.empty() || p_str.empty()) {
      throw FormatError("CSV column '" + name + "' is not <field>.<component>.<point>");
    }
    auto [it, inserted] = extent.try_emplace(field, 0, 0);
    if (inserted) order.push_back(field);
    it->second.first = std::max(it->second.first, comp + 1);
    it->second.second = std::max(it->second.second, point + 1);
  }
  std::vector<FieldSpec> specs;
  for (const auto& name : order) specs.push_back({name, extent[name].first, extent[name].second, {}, {}});
  FieldLayout layout(std::move(specs));
  (void)read_csv_for_layout(text, layout);  // validates exact ordering

  std::vector<RawField> fields;
  Eigen::Index row = 0;
  for (const auto& f : layout.fields()) {
    const auto n = static_cast<Eigen::Index>(f.size());
    fields.push_back({f.name, f.components, f.points, table.values.middleRows(row, n)});
    row += n;
  }
  return assemble_snapshots(fields, table.times, ScalingPolicy::identity());
}

CsvTable read_csv_for_layout(std::string_view text, const FieldLayout& layout) {
  auto table = parse_csv(text);
  const auto expected = csv_column_names(layout);
  const auto n = std::min(expected.size(), table.header.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (table.header[i] != expected[i]) {
      throw FormatError("CSV schema mismatch at column " + std::to_string(i + 1) + ": got '" + table.header[i] +
                        "', expected '" + expected[i] + "'");
    }
  }
  if (table.header.size() < expected.size()) {
    throw FormatError("CSV schema mismatch: missing column '" + expected[table.header.size()] + "'");
  }
  if (table.header.size() > expected.size()) {
    throw FormatError("CSV schema mismatch: unexpected column '" + table.header[expected.size()] + "'");
  }
  return table;
}

}  // namespace gasrom
