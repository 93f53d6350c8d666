#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace drl::harness {

enum class ValueType { integer, real, boolean, string, int_list, real_list, string_list };

struct KeySpec {
  std::string key;  // "section.name"
  ValueType type;
  std::string default_text;  // empty: optional, unset unless given
  std::string help;
};

/// The full set of recognised keys.
const std::vector<KeySpec>& config_schema();

/// Flat, sectioned key = value text:
///
///   # comment
///   [agent]
///   d = 4
///   lr = 3e-4
///   members = [4:0, 4:2, 4:4]
///
/// Values are ints, floats, booleans (true/false), strings (bare or
/// "quoted") and bracketed comma-separated lists. Keys are checked against
/// config_schema(); unknown keys and ill-typed values raise UsageError
/// naming the key and where it came from.
class Config {
 public:
  Config();

  static Config parse(const std::string& text, const std::string& origin);
  static Config load(const std::filesystem::path& path);

  /// Applies "section.key=value".
  void apply_override(const std::string& assignment);
  void set(const std::string& key, const std::string& value, const std::string& origin);
  /// DRL_SEED replaces run.seed when set; returns true if it did.
  bool apply_environment();

  bool has(const std::string& key) const;  // explicitly given or defaulted
  bool explicitly_set(const std::string& key) const;

  std::int64_t get_int(const std::string& key) const;
  double get_real(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::vector<std::int64_t> get_int_list(const std::string& key) const;
  std::vector<double> get_real_list(const std::string& key) const;
  std::vector<std::string> get_string_list(const std::string& key) const;

  /// Fully resolved config in canonical form; parsing it back yields an
  /// equal config.
  std::string echo() const;
  /// FNV-1a of echo() without run.out, as 16 hex digits.
  std::string hash() const;

  const std::vector<std::string>& notes() const { return notes_; }

 private:
  const KeySpec& spec(const std::string& key) const;
  const std::string& raw(const std::string& key, ValueType type) const;

  std::map<std::string, std::string> values_;  // canonical text
  std::map<std::string, bool> explicit_;
  std::vector<std::string> notes_;
};

}  // namespace drl::harness
