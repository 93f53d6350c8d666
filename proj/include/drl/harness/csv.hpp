#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace drl::harness {

/// Provenance written as a comment line at the top of every output file.
struct RunStamp {
  std::string config_hash;
  std::string code_version;
  std::string ruleset;
  std::uint64_t seed = 0;

  std::string line() const;
};

RunStamp make_stamp(const std::string& config_hash, std::uint64_t seed);

/// Append-only CSV with a stamp comment and a header row. Reopening an
/// existing file (resume) appends rows after checking the header.
class CsvLog {
 public:
  CsvLog() = default;
  CsvLog(const std::filesystem::path& path, const RunStamp& stamp, std::vector<std::string> columns);

  void row(const std::vector<std::string>& values);
  bool is_open() const { return out_.is_open(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::size_t n_columns_ = 0;
  std::ofstream out_;
};

/// Shortest round-trip decimal form; "nan"/"inf" for non-finite values.
std::string fmt(double v);
std::string fmt(std::int64_t v);

}  // namespace drl::harness
