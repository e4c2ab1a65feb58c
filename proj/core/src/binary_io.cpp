#include "gasrom/binary_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "gasrom/error.hpp"

namespace gasrom::io {

static_assert(std::endian::native == std::endian::little,
              "container encoding assumes a little-endian host");

namespace {

template <typename T>
void append_raw(std::vector<std::uint8_t>& buf, T v) {
  std::uint8_t tmp[sizeof(T)];
  std::memcpy(tmp, &v, sizeof(T));
  buf.insert(buf.end(), tmp, tmp + sizeof(T));
}

}  // namespace

void ByteWriter::magic(std::string_view four_cc) {
  buf_.insert(buf_.end(), four_cc.begin(), four_cc.end());
}
void ByteWriter::u8(std::uint8_t v) { buf_.push_back(v); }
void ByteWriter::u16(std::uint16_t v) { append_raw(buf_, v); }
void ByteWriter::u32(std::uint32_t v) { append_raw(buf_, v); }
void ByteWriter::f64(double v) { append_raw(buf_, v); }

void ByteWriter::f64s(std::span<const double> values) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(values.data());
  buf_.insert(buf_.end(), p, p + values.size_bytes());
}

void ByteWriter::str16(std::string_view s) {
  if (s.size() > 0xFFFF) throw FormatError("string longer than 65535 bytes: " + std::string(s.substr(0, 32)));
  u16(static_cast<std::uint16_t>(s.size()));
  buf_.insert(buf_.end(), s.begin(), s.end());
}

void ByteWriter::bytes(std::span<const std::uint8_t> raw) { buf_.insert(buf_.end(), raw.begin(), raw.end()); }

void ByteReader::require(std::size_t n) const {
  if (remaining() < n) {
    throw FormatError(context_ + " truncated: expected " + std::to_string(pos_ + n) +
                      " bytes, file has " + std::to_string(data_.size()));
  }
}

void ByteReader::expect_magic(std::string_view four_cc) {
  if (remaining() < four_cc.size()) {
    throw FormatError(context_ + ": magic mismatch, expected '" + std::string(four_cc) +
                      "' but file has only " + std::to_string(remaining()) + " bytes");
  }
  std::string got(reinterpret_cast<const char*>(data_.data() + pos_), four_cc.size());
  if (got != four_cc) {
    throw FormatError(context_ + ": magic mismatch, expected '" + std::string(four_cc) + "' got '" + got + "'");
  }
  pos_ += four_cc.size();
}

std::string ByteReader::peek_magic() const {
  if (remaining() < 4) return {};
  return std::string(reinterpret_cast<const char*>(data_.data() + pos_), 4);
}

std::uint8_t ByteReader::u8() {
  require(1);
  return data_[pos_++];
}

std::uint16_t ByteReader::u16() {
  require(2);
  std::uint16_t v;
  std::memcpy(&v, data_.data() + pos_, 2);
  pos_ += 2;
  return v;
}

std::uint32_t ByteReader::u32() {
  require(4);
  std::uint32_t v;
  std::memcpy(&v, data_.data() + pos_, 4);
  pos_ += 4;
  return v;
}

double ByteReader::f64() {
  require(8);
  double v;
  std::memcpy(&v, data_.data() + pos_, 8);
  pos_ += 8;
  return v;
}

void ByteReader::f64s(std::span<double> out) {
  require(out.size_bytes());
  std::memcpy(out.data(), data_.data() + pos_, out.size_bytes());
  pos_ += out.size_bytes();
}

std::string ByteReader::str16() {
  const auto n = u16();
  require(n);
  std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
  pos_ += n;
  return s;
}

void ByteReader::skip(std::size_t n) {
  require(n);
  pos_ += n;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open file for writing: " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ConfigError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw ConfigError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace gasrom::io
