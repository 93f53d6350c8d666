#pragma once

// "DRL1" tagged little-endian binary container used for checkpoints.
//
//   magic    4 bytes  "DRL1"
//   version  u32      currently 1
//   count    u32      number of records
//   record*  tag (4 ASCII bytes), u64 payload length, payload bytes
//
// Integers and IEEE-754 doubles are written little-endian regardless of host.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "drl/core/types.hpp"

namespace drl {

inline constexpr std::string_view kArchiveMagic = "DRL1";
inline constexpr std::uint32_t kArchiveVersion = 1;

class ByteWriter {
 public:
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v);
  void str(std::string_view s);
  void f64s(std::span<const double> values);

  const std::string& bytes() const { return bytes_; }
  std::string take() { return std::move(bytes_); }

 private:
  std::string bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64();
  std::string str();
  std::vector<double> f64s();
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view take(std::size_t n);

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

class Archive {
 public:
  /// Adds or replaces a record. Tags are exactly four characters.
  void put(std::string_view tag, std::string payload);
  bool has(std::string_view tag) const;
  /// Payload of a record; throws UsageError when absent.
  const std::string& get(std::string_view tag) const;
  std::vector<std::string> tags() const;

  std::string serialize() const;
  static Archive parse(std::string_view bytes);

  void save(const std::filesystem::path& path) const;
  static Archive load(const std::filesystem::path& path);

 private:
  std::vector<std::pair<std::string, std::string>> records_;
};

void write_schema(ByteWriter& w, const StateSchema& schema);
StateSchema read_schema(ByteReader& r);
void write_state(ByteWriter& w, const MixedState& state);
MixedState read_state(ByteReader& r);

}  // namespace drl
