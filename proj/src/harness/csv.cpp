#include "drl/harness/csv.hpp"

#include <charconv>
#include <cmath>

#include "drl/core/errors.hpp"
#include "drl/core/version.hpp"
#include "drl/envs/minimelee.hpp"

namespace drl::harness {

std::string RunStamp::line() const {
  return "# config_hash=" + config_hash + " code_version=" + code_version + " ruleset=" + ruleset +
         " seed=" + std::to_string(seed);
}

RunStamp make_stamp(const std::string& config_hash, std::uint64_t seed) {
  return {config_hash, std::string(kCodeVersion), std::string(envs::MeleeRules::kVersion), seed};
}

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

}  // namespace

CsvLog::CsvLog(const std::filesystem::path& path, const RunStamp& stamp, std::vector<std::string> columns)
    : path_(path), n_columns_(columns.size()) {
  const std::string header = join(columns);
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    std::string line;
    std::string found;
    while (std::getline(in, line)) {
      if (!line.empty() && line[0] != '#') {
        found = line;
        break;
      }
    }
    if (found != header) throw UsageError("cannot append to '" + path.string() + "': header differs");
    out_.open(path, std::ios::app);
  } else {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path);
    out_ << stamp.line() << "\n" << header << "\n";
  }
  if (!out_) throw std::runtime_error("cannot write '" + path.string() + "'");
  out_.flush();
}

void CsvLog::row(const std::vector<std::string>& values) {
  require(values.size() == n_columns_, "csv: row width does not match the header");
  out_ << join(values) << "\n";
  out_.flush();
  if (!out_) throw std::runtime_error("write failed on '" + path_.string() + "'");
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string fmt(std::int64_t v) { return std::to_string(v); }

}  // namespace drl::harness
