#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "drl/agents/agent.hpp"
#include "drl/envs/make_env.hpp"
#include "drl/harness/config.hpp"

namespace drl::harness {

struct OpponentConfig {
  int delay = 2;
  double epsilon = 0.1;
  double range = 1.2;
  bool shield = true;
};

struct MatchConfig {
  std::string a;
  std::string b;
  int episodes = 1000;
  bool greedy = false;
};

/// Validated, typed view of a Config.
struct ExperimentConfig {
  std::string env_name;
  envs::EnvParams env_params;
  agents::AgentConfig agent;
  std::vector<agents::AgentConfig> population;
  int episodes_per_pair = 1;
  int scripted_episodes = 0;
  OpponentConfig opponent;
  MatchConfig match;
  std::string grid;

  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds;
  std::int64_t steps = 0;
  int batch = 4;
  int workers = 1;
  bool deterministic = true;
  std::int64_t eval_every = 0;
  int eval_episodes = 0;
  std::int64_t checkpoint_every = 0;
  int log_every = 1;
  std::filesystem::path out;
  std::string resume;

  Config source;  // resolved config this view came from
  std::string config_hash;

  bool two_player() const { return env_name == "minimelee"; }
  bool parallel() const { return !deterministic && workers > 1; }
};

/// Builds and validates; errors name the offending key.
ExperimentConfig make_experiment(const Config& cfg);

/// Parses "d:p" population members.
agents::AgentConfig member_config(const agents::AgentConfig& base, const std::string& member);

}  // namespace drl::harness
