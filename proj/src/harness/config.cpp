#include "drl/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "drl/core/errors.hpp"
#include "drl/core/hash.hpp"

namespace drl::harness {

namespace {

using VT = ValueType;

std::vector<KeySpec> build_schema() {
  return {
      {"run.seed", VT::integer, "1", "base seed (DRL_SEED overrides)"},
      {"run.seeds", VT::int_list, "[]", "seed list for multi-seed runs; empty means [run.seed]"},
      {"run.steps", VT::integer, "100000", "training budget in agent steps (per agent)"},
      {"run.batch", VT::integer, "4", "trajectories per learner update"},
      {"run.workers", VT::integer, "1", "actor threads; 1 with deterministic = true is synchronous"},
      {"run.deterministic", VT::boolean, "true", "single-threaded synchronous mode, wall_ms logged as 0"},
      {"run.eval_every", VT::integer, "10000", "agent steps between evaluations; 0 disables"},
      {"run.eval_episodes", VT::integer, "100", "episodes per evaluation"},
      {"run.checkpoint_every", VT::integer, "0", "agent steps between checkpoints; 0 keeps initial and final"},
      {"run.log_every", VT::integer, "1", "learner updates per metrics row"},
      {"run.out", VT::string, "\"runs/default\"", "output directory"},
      {"run.resume", VT::string, "", "checkpoint to resume from"},
      {"env.name", VT::string, "\"chain\"", "chain | gridworld | mountaincar | minimelee"},
      {"env.n", VT::integer, "", "chain length"},
      {"env.width", VT::integer, "", "gridworld width"},
      {"env.height", VT::integer, "", "gridworld height"},
      {"env.slip", VT::real, "", "gridworld slip probability"},
      {"env.max_steps", VT::integer, "", "episode length cap"},
      {"agent.d", VT::integer, "0", "action delay in agent steps"},
      {"agent.p", VT::integer, "0", "predictor unroll steps (p <= d)"},
      {"agent.f", VT::integer, "1", "frame skip"},
      {"agent.gamma", VT::real, "0.99", "discount"},
      {"agent.rho_bar", VT::real, "1", "V-trace rho clip"},
      {"agent.c_bar", VT::real, "1", "V-trace c clip"},
      {"agent.entropy_weight", VT::real, "0.01", "entropy bonus weight"},
      {"agent.value_weight", VT::real, "0.5", "value loss weight"},
      {"agent.model_weight", VT::real, "1", "predictor loss weight"},
      {"agent.unroll", VT::integer, "40", "trajectory length T"},
      {"agent.model_unroll", VT::integer, "0", "predictor regression horizon K; 0 means max(p, 1)"},
      {"agent.hidden", VT::integer, "128", "policy/value trunk width"},
      {"agent.layers", VT::integer, "2", "policy/value trunk depth"},
      {"agent.gru_hidden", VT::integer, "128", "predictor core width"},
      {"agent.head_hidden", VT::integer, "128", "predictor head width"},
      {"agent.lr", VT::real, "0.0001", "Adam learning rate"},
      {"agent.beta1", VT::real, "0.9", "Adam beta1"},
      {"agent.beta2", VT::real, "0.999", "Adam beta2"},
      {"agent.eps", VT::real, "1e-08", "Adam epsilon"},
      {"agent.clip_norm", VT::real, "5", "global gradient-norm clip; 0 disables"},
      {"opponent.delay", VT::integer, "2", "scripted opponent reaction delay (lower is harder)"},
      {"opponent.epsilon", VT::real, "0.1", "scripted opponent random-action probability"},
      {"opponent.range", VT::real, "1.2", "scripted opponent attack range"},
      {"opponent.shield", VT::boolean, "true", "scripted opponent shields against visible attacks"},
      {"population.members", VT::string_list, "[]", "self-play members as d:p pairs"},
      {"population.episodes_per_pair", VT::integer, "1", "episodes per round-robin pairing"},
      {"population.scripted_episodes", VT::integer, "0", "episodes per member per round against the scripted opponent"},
      {"match.a", VT::string, "", "checkpoint of agent A"},
      {"match.b", VT::string, "", "checkpoint of agent B"},
      {"match.episodes", VT::integer, "1000", "episodes per match"},
      {"match.greedy", VT::boolean, "false", "argmax actions instead of sampling"},
      {"sweep.grid", VT::string, "", "grid such as d=0,1,2;p=0"},
      {"oracle.chain_sizes", VT::int_list, "[3, 5, 8]", "chain lengths for the MBS comparison"},
      {"oracle.delays", VT::int_list, "[1, 2, 3]", "delays for the MBS comparison"},
      {"oracle.gamma", VT::real, "0.9", "discount of the oracle MDPs"},
      {"oracle.grid_width", VT::integer, "4", "gridworld width"},
      {"oracle.grid_height", VT::integer, "3", "gridworld height"},
      {"oracle.stochastic_slip", VT::real, "0.3", "slip of the stochastic gridworld check"},
      {"oracle.stochastic_delay", VT::integer, "2", "delay of the stochastic gridworld check"},
      {"oracle.stochastic_gamma", VT::real, "0.99", "discount of the stochastic gridworld check"},
      {"gradcheck.seeds", VT::integer, "10", "seeds per finite-difference suite"},
  };
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string type_name(ValueType t) {
  switch (t) {
    case VT::integer: return "integer";
    case VT::real: return "number";
    case VT::boolean: return "boolean";
    case VT::string: return "string";
    case VT::int_list: return "list of integers";
    case VT::real_list: return "list of numbers";
    case VT::string_list: return "list of strings";
  }
  return "?";
}

bool parse_int(const std::string& s, std::int64_t& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && !s.empty();
}

bool parse_real(const std::string& s, double& out) {
  const char* begin = s.data();
  if (!s.empty() && s[0] == '+') ++begin;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && begin != end && std::isfinite(out);
}

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string unquote(const std::string& s, bool& ok) {
  ok = true;
  if (s.size() < 2 || s.front() != '"') return s;
  if (s.back() != '"') {
    ok = false;
    return s;
  }
  std::string out;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (s[i] == '\\' && i + 2 < s.size()) {
      out += s[++i];
    } else {
      out += s[i];
    }
  }
  return out;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_list(const std::string& text) {
  std::string body = trim(text);
  if (!body.empty() && body.front() == '[') {
    if (body.back() != ']') return {"\x01"};
    body = trim(std::string_view(body).substr(1, body.size() - 2));
  }
  std::vector<std::string> items;
  if (body.empty()) return items;
  std::string cur;
  bool in_quote = false;
  for (char c : body) {
    if (c == '"') in_quote = !in_quote;
    if (c == ',' && !in_quote) {
      items.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  items.push_back(trim(cur));
  return items;
}

// Canonical text of `text` interpreted as `type`; empty optional on failure.
bool canonicalize(ValueType type, const std::string& text, std::string& out) {
  const std::string t = trim(text);
  switch (type) {
    case VT::integer: {
      std::int64_t v;
      if (!parse_int(t, v)) return false;
      out = std::to_string(v);
      return true;
    }
    case VT::real: {
      double v;
      if (!parse_real(t, v)) return false;
      out = format_real(v);
      return true;
    }
    case VT::boolean:
      if (t == "true" || t == "false") {
        out = t;
        return true;
      }
      return false;
    case VT::string: {
      bool ok;
      const std::string s = unquote(t, ok);
      if (!ok) return false;
      out = quote(s);
      return true;
    }
    case VT::int_list:
    case VT::real_list:
    case VT::string_list: {
      const ValueType elem = type == VT::int_list ? VT::integer : type == VT::real_list ? VT::real : VT::string;
      std::string joined = "[";
      const auto items = split_list(t);
      for (std::size_t i = 0; i < items.size(); ++i) {
        std::string c;
        if (items[i].empty() || !canonicalize(elem, items[i], c)) return false;
        joined += (i ? ", " : "") + c;
      }
      out = joined + "]";
      return true;
    }
  }
  return false;
}

}  // namespace

const std::vector<KeySpec>& config_schema() {
  static const std::vector<KeySpec> schema = build_schema();
  return schema;
}

Config::Config() {
  for (const auto& k : config_schema()) {
    if (k.default_text.empty()) continue;
    std::string c;
    canonicalize(k.type, k.default_text, c);
    values_[k.key] = c;
  }
}

const KeySpec& Config::spec(const std::string& key) const {
  for (const auto& k : config_schema()) {
    if (k.key == key) return k;
  }
  throw UsageError("unknown config key '" + key + "'");
}

void Config::set(const std::string& key, const std::string& value, const std::string& origin) {
  const KeySpec* k = nullptr;
  for (const auto& s : config_schema()) {
    if (s.key == key) k = &s;
  }
  if (k == nullptr) throw UsageError(origin + ": unknown config key '" + key + "'");
  std::string c;
  if (!canonicalize(k->type, value, c)) {
    throw UsageError(origin + ": key '" + key + "' expects a " + type_name(k->type) + ", got '" + trim(value) + "'");
  }
  values_[key] = c;
  explicit_[key] = true;
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw UsageError(where + ": malformed section header '" + t + "'");
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw UsageError(where + ": expected key = value, got '" + t + "'");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    // Trailing comments outside quotes.
    bool in_quote = false;
    for (std::size_t i = 0; i < value.size(); ++i) {
      if (value[i] == '"') in_quote = !in_quote;
      if (value[i] == '#' && !in_quote) {
        value = trim(std::string_view(value).substr(0, i));
        break;
      }
    }
    if (section.empty()) throw UsageError(where + ": key '" + key + "' appears before any [section]");
    cfg.set(section + "." + key, value, where);
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void Config::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw UsageError("override '" + assignment + "' is not of the form section.key=value");
  const std::string key = trim(std::string_view(assignment).substr(0, eq));
  if (key.find('.') == std::string::npos) throw UsageError("override key '" + key + "' must be section.key");
  set(key, assignment.substr(eq + 1), "override");
}

bool Config::apply_environment() {
  const char* env = std::getenv("DRL_SEED");
  if (env == nullptr || *env == '\0') return false;
  set("run.seed", env, "DRL_SEED");
  notes_.push_back("run.seed taken from DRL_SEED=" + std::string(env));
  return true;
}

bool Config::has(const std::string& key) const {
  spec(key);
  return values_.count(key) > 0;
}

bool Config::explicitly_set(const std::string& key) const {
  spec(key);
  return explicit_.count(key) > 0;
}

const std::string& Config::raw(const std::string& key, ValueType type) const {
  const auto& k = spec(key);
  require(k.type == type, "config: key '" + key + "' read with the wrong type");
  const auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("config key '" + key + "' is required but not set");
  return it->second;
}

std::int64_t Config::get_int(const std::string& key) const {
  std::int64_t v = 0;
  parse_int(raw(key, VT::integer), v);
  return v;
}

double Config::get_real(const std::string& key) const {
  double v = 0;
  parse_real(raw(key, VT::real), v);
  return v;
}

bool Config::get_bool(const std::string& key) const { return raw(key, VT::boolean) == "true"; }

std::string Config::get_string(const std::string& key) const {
  bool ok;
  return unquote(raw(key, VT::string), ok);
}

std::vector<std::int64_t> Config::get_int_list(const std::string& key) const {
  std::vector<std::int64_t> out;
  for (const auto& item : split_list(raw(key, VT::int_list))) {
    std::int64_t v = 0;
    parse_int(item, v);
    out.push_back(v);
  }
  return out;
}

std::vector<double> Config::get_real_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(raw(key, VT::real_list))) {
    double v = 0;
    parse_real(item, v);
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> Config::get_string_list(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& item : split_list(raw(key, VT::string_list))) {
    bool ok;
    out.push_back(unquote(item, ok));
  }
  return out;
}

std::string Config::echo() const {
  std::string out;
  std::string section;
  for (const auto& [key, value] : values_) {
    const auto dot = key.find('.');
    const std::string sec = key.substr(0, dot);
    if (sec != section) {
      out += (section.empty() ? "" : "\n") + std::string("[") + sec + "]\n";
      section = sec;
    }
    out += key.substr(dot + 1) + " = " + value + "\n";
  }
  return out;
}

std::string Config::hash() const {
  // The output directory names where a run goes, not what it computes.
  Config copy = *this;
  copy.values_.erase("run.out");
  return hex64(fnv1a64(copy.echo()));
}

}  // namespace drl::harness
