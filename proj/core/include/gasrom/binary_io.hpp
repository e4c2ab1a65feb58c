#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gasrom::io {

/// Little-endian byte sink for the container formats (SNP1, POD1, OPI1, ARM1, MDL1).
class ByteWriter {
 public:
  void magic(std::string_view four_cc);
  void u8(std::uint8_t v);
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void f64(double v);
  void f64s(std::span<const double> values);
  /// u16 length prefix followed by UTF-8 bytes.
  void str16(std::string_view s);
  void bytes(std::span<const std::uint8_t> raw);

  const std::vector<std::uint8_t>& buffer() const noexcept { return buf_; }
  std::vector<std::uint8_t> release() noexcept { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

/// Bounds-checked little-endian reader. Every short read throws FormatError
/// naming the expected and actual byte counts.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data, std::string context = "container")
      : data_(data), context_(std::move(context)) {}

  /// Throws FormatError on mismatch, naming both magics.
  void expect_magic(std::string_view four_cc);
  std::string peek_magic() const;

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  double f64();
  void f64s(std::span<double> out);
  std::string str16();

  /// Throws unless `n` more bytes are available.
  void require(std::size_t n) const;

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  std::span<const std::uint8_t> rest() const noexcept { return data_.subspan(pos_); }
  void skip(std::size_t n);

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  std::string context_;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace gasrom::io
