#pragma once

// Little-endian byte codecs, text tokenizing helpers and file utilities
// shared by all on-disk formats.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace netcong {

class ByteWriter {
 public:
  void put_bytes(std::string_view s) { buf_.append(s); }
  void put_u32(std::uint32_t v);
  void put_u64(std::uint64_t v);
  void put_f32(float v);
  void put_f64(double v);
  void put_string(std::string_view s);  // u32 length prefix

  const std::string& bytes() const { return buf_; }
  std::string take() { return std::move(buf_); }

 private:
  std::string buf_;
};

/// Reads from a byte buffer; any truncation raises a format error.
class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view get_bytes(std::size_t n);
  std::uint32_t get_u32();
  std::uint64_t get_u64();
  float get_f32();
  double get_f64();
  std::string get_string();

  std::size_t remaining() const { return bytes_.size() - pos_; }
  void expect_end() const;

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

// Text helpers.

/// Splits on '\n', stripping a trailing '\r'. A final empty line after the
/// last newline is not reported.
std::vector<std::string_view> split_lines(std::string_view text);
std::vector<std::string_view> split_ws(std::string_view line);
std::vector<std::string_view> split_char(std::string_view line, char sep);
std::string_view trim(std::string_view s);

std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);

/// Shortest text form that parses back to the identical double.
std::string format_double(double v);

// File helpers.

std::string read_file(const std::filesystem::path& path);
/// Writes via a temporary sibling file and rename, so readers never observe
/// a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view data);

/// 64-bit FNV-1a, used for cache keys.
class Fnv1a {
 public:
  void update(std::string_view bytes);
  void update_u64(std::uint64_t v);
  void update_f64(double v);
  std::uint64_t digest() const { return state_; }
  std::string hex() const;
 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

/// SplitMix64 finalizer; used to derive independent seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace netcong
