#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "drl/harness/train.hpp"

namespace drl::harness {

struct SelfPlayResult {
  std::vector<std::string> ids;
  std::vector<std::filesystem::path> checkpoints;
  std::vector<std::int64_t> steps;
  std::vector<double> mean_return;  // per agent, over the last quarter of its episodes
};

/// Round-robin self-play on mini-melee. Every pairing plays
/// population.episodes_per_pair episodes per round, sides alternating by
/// round, and every member also plays population.scripted_episodes episodes
/// against the scripted opponent; each member learns from its own
/// trajectories until it has used run.steps agent steps. Writes per-agent metrics CSVs, a rewards CSV and
/// checkpoints.
SelfPlayResult selfplay_train(const ExperimentConfig& cfg);

std::string member_id(std::size_t index, const agents::AgentConfig& c);

struct MatchResult {
  std::string agent_a;
  std::string agent_b;
  int episodes = 0;
  double mean_reward_a = 0.0;
  double mean_reward_b = 0.0;
  int ko_a = 0;  // knockouts scored by A
  int ko_b = 0;
  int wins_a = 0;
  int wins_b = 0;
  int draws = 0;
  double win_rate_a = 0.0;  // (wins + draws / 2) / episodes
  Interval ci;              // Wilson, 95%
  std::string config_hash;
  std::uint64_t seed = 0;
};

nlohmann::json to_json(const MatchResult& r);

/// Plays `episodes` episodes between two checkpoints, each under its own
/// delay. Sides alternate every episode. Checkpoints are only read.
MatchResult head_to_head(const ExperimentConfig& cfg, const std::filesystem::path& a,
                         const std::filesystem::path& b, int episodes, std::uint64_t seed);

struct DeterminismReport {
  enum class Status { pass, fail, not_applicable } status = Status::pass;
  std::string message;
  std::size_t first_divergent_line = 0;  // 1-based, 0 when identical
};

/// Trains twice (seeds seed_a and seed_b) into cfg.out/run_a and run_b and
/// compares metrics.csv byte for byte.
DeterminismReport determinism_check(const ExperimentConfig& cfg, std::uint64_t seed_a, std::uint64_t seed_b);

/// First differing line (1-based) of two files, 0 if identical.
std::size_t first_difference(const std::filesystem::path& a, const std::filesystem::path& b);

struct SweepPoint {
  std::vector<std::pair<std::string, std::string>> assignment;  // full config keys
  std::string label;
};

/// "d=0,1,2;p=0" -> cartesian product. Bare d, p, f mean agent.d etc.
std::vector<SweepPoint> expand_grid(const std::string& grid);

struct SweepRun {
  std::string label;
  std::uint64_t seed = 0;
  std::filesystem::path dir;
  double final_return = 0.0;
};

/// Runs train() for every valid grid point and seed, into
/// cfg.out/<label>[_s<seed>], and writes cfg.out/sweep.csv.
std::vector<SweepRun> sweep(const ExperimentConfig& cfg, const std::string& grid);

}  // namespace drl::harness
