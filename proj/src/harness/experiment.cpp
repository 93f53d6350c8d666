#include "drl/harness/experiment.hpp"

#include <exception>

#include "drl/core/errors.hpp"

namespace drl::harness {

namespace {

void check(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw UsageError("config key '" + key + "': " + what);
}

int as_int(const Config& c, const std::string& key, std::int64_t lo, std::int64_t hi = 1'000'000'000) {
  const auto v = c.get_int(key);
  check(v >= lo && v <= hi, key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " +
                                     std::to_string(v));
  return static_cast<int>(v);
}

}  // namespace

agents::AgentConfig member_config(const agents::AgentConfig& base, const std::string& member) {
  const auto colon = member.find(':');
  check(colon != std::string::npos, "population.members", "member '" + member + "' is not of the form d:p");
  agents::AgentConfig c = base;
  try {
    std::size_t used = 0;
    c.d = std::stoi(member.substr(0, colon), &used);
    check(used == colon, "population.members", "bad delay in '" + member + "'");
    const std::string p = member.substr(colon + 1);
    c.p = std::stoi(p, &used);
    check(used == p.size(), "population.members", "bad p in '" + member + "'");
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw UsageError("config key 'population.members': member '" + member + "' is not of the form d:p");
  }
  try {
    c.validate();
  } catch (const ContractViolation& e) {
    throw UsageError("config key 'population.members': member '" + member + "': " + e.what());
  }
  return c;
}

ExperimentConfig make_experiment(const Config& cfg) {
  ExperimentConfig x;
  x.source = cfg;
  x.config_hash = cfg.hash();

  x.env_name = cfg.get_string("env.name");
  for (const char* key : {"n", "width", "height", "max_steps"}) {
    const std::string full = std::string("env.") + key;
    if (cfg.explicitly_set(full)) x.env_params[key] = static_cast<double>(cfg.get_int(full));
  }
  if (cfg.explicitly_set("env.slip")) x.env_params["slip"] = cfg.get_real("env.slip");
  try {
    (void)envs::make_env(x.env_name, x.env_params, RngStream(0, 0));
  } catch (const UsageError& e) {
    throw UsageError("config section [env]: " + std::string(e.what()));
  } catch (const ContractViolation& e) {
    throw UsageError("config section [env]: " + std::string(e.what()));
  }

  auto& a = x.agent;
  a.d = as_int(cfg, "agent.d", 0, 64);
  a.p = as_int(cfg, "agent.p", 0, 64);
  a.f = as_int(cfg, "agent.f", 1, 64);
  a.gamma = cfg.get_real("agent.gamma");
  a.rho_bar = cfg.get_real("agent.rho_bar");
  a.c_bar = cfg.get_real("agent.c_bar");
  a.entropy_weight = cfg.get_real("agent.entropy_weight");
  a.value_weight = cfg.get_real("agent.value_weight");
  a.model_weight = cfg.get_real("agent.model_weight");
  a.unroll = as_int(cfg, "agent.unroll", 1, 100000);
  a.model_unroll = as_int(cfg, "agent.model_unroll", 0, 64);
  a.hidden = as_int(cfg, "agent.hidden", 1, 4096);
  a.layers = as_int(cfg, "agent.layers", 1, 16);
  a.predictor.gru_hidden = as_int(cfg, "agent.gru_hidden", 1, 4096);
  a.predictor.head_hidden = as_int(cfg, "agent.head_hidden", 1, 4096);
  a.adam.lr = cfg.get_real("agent.lr");
  a.adam.beta1 = cfg.get_real("agent.beta1");
  a.adam.beta2 = cfg.get_real("agent.beta2");
  a.adam.eps = cfg.get_real("agent.eps");
  a.adam.clip_norm = cfg.get_real("agent.clip_norm");
  check(a.adam.lr > 0.0, "agent.lr", "must be positive");
  check(a.adam.beta1 >= 0.0 && a.adam.beta1 < 1.0, "agent.beta1", "must lie in [0, 1)");
  check(a.adam.beta2 >= 0.0 && a.adam.beta2 < 1.0, "agent.beta2", "must lie in [0, 1)");
  check(a.adam.eps > 0.0, "agent.eps", "must be positive");
  try {
    a.validate();
  } catch (const ContractViolation& e) {
    throw UsageError("config section [agent]: " + std::string(e.what()));
  }

  for (const auto& m : cfg.get_string_list("population.members")) x.population.push_back(member_config(a, m));
  x.episodes_per_pair = as_int(cfg, "population.episodes_per_pair", 1);
  x.scripted_episodes = as_int(cfg, "population.scripted_episodes", 0);

  x.opponent.delay = as_int(cfg, "opponent.delay", 0, 64);
  x.opponent.epsilon = cfg.get_real("opponent.epsilon");
  check(x.opponent.epsilon >= 0.0 && x.opponent.epsilon <= 1.0, "opponent.epsilon", "must lie in [0, 1]");
  x.opponent.range = cfg.get_real("opponent.range");
  check(x.opponent.range > 0.0, "opponent.range", "must be positive");
  x.opponent.shield = cfg.get_bool("opponent.shield");

  if (cfg.explicitly_set("match.a")) x.match.a = cfg.get_string("match.a");
  if (cfg.explicitly_set("match.b")) x.match.b = cfg.get_string("match.b");
  x.match.episodes = as_int(cfg, "match.episodes", 0);
  x.match.greedy = cfg.get_bool("match.greedy");
  if (cfg.explicitly_set("sweep.grid")) x.grid = cfg.get_string("sweep.grid");

  const auto seed = cfg.get_int("run.seed");
  check(seed >= 0, "run.seed", "must be non-negative");
  x.seed = static_cast<std::uint64_t>(seed);
  for (auto s : cfg.get_int_list("run.seeds")) {
    check(s >= 0, "run.seeds", "seeds must be non-negative");
    x.seeds.push_back(static_cast<std::uint64_t>(s));
  }
  if (x.seeds.empty()) x.seeds.push_back(x.seed);
  x.steps = cfg.get_int("run.steps");
  check(x.steps >= 0, "run.steps", "must be non-negative");
  x.batch = as_int(cfg, "run.batch", 1, 4096);
  x.workers = as_int(cfg, "run.workers", 1, 256);
  x.deterministic = cfg.get_bool("run.deterministic");
  x.eval_every = cfg.get_int("run.eval_every");
  check(x.eval_every >= 0, "run.eval_every", "must be non-negative");
  x.eval_episodes = as_int(cfg, "run.eval_episodes", 0);
  check(x.eval_every == 0 || x.eval_episodes > 0, "run.eval_episodes", "must be positive when evaluating");
  x.checkpoint_every = cfg.get_int("run.checkpoint_every");
  check(x.checkpoint_every >= 0, "run.checkpoint_every", "must be non-negative");
  x.log_every = as_int(cfg, "run.log_every", 1);
  x.out = cfg.get_string("run.out");
  check(!x.out.empty(), "run.out", "must not be empty");
  if (cfg.explicitly_set("run.resume")) x.resume = cfg.get_string("run.resume");
  return x;
}

}  // namespace drl::harness
