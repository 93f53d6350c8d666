#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "drl/agents/checkpoint.hpp"
#include "drl/agents/learner.hpp"
#include "drl/harness/csv.hpp"
#include "drl/harness/experiment.hpp"
#include "drl/harness/stats.hpp"

namespace drl::harness {

/// Learner-side state of one agent.
struct AgentState {
  /// Parameters are drawn from (seed, init stream); population members pass
  /// their index so they start from different points.
  AgentState(const StateSchema& schema, int n_actions, const agents::AgentConfig& config, std::uint64_t seed,
             std::uint64_t member = 0);

  agents::AgentNets nets;
  std::vector<double> params;
  nn::Adam adam;
  std::int64_t steps = 0;  // agent steps consumed

  agents::Checkpoint checkpoint(const std::string& env, const std::string& config_hash, std::uint64_t seed) const;
  void restore(const agents::Checkpoint& ckpt);
};

/// Stream ids carved out of one seed.
namespace streams {
inline constexpr std::uint64_t kInit = 1;
inline constexpr std::uint64_t kPolicy = 2;
inline constexpr std::uint64_t kEnv = 3;
inline constexpr std::uint64_t kOpponent = 4;
inline constexpr std::uint64_t kEval = 100;
inline constexpr std::uint64_t kWorker = 1000;
}  // namespace streams

/// The environment an agent trains on: single-agent envs as they are,
/// mini-melee against the scripted opponent.
std::unique_ptr<envs::Environment> make_training_env(const ExperimentConfig& cfg, const RngStream& rng);

struct EvalResult {
  std::int64_t step = 0;
  int episodes = 0;
  double mean_return = 0.0;  // sampled actions
  Interval ci;
  double greedy_mean_return = 0.0;
};

/// Frozen-policy evaluation: `episodes` sampled episodes plus as many greedy
/// ones, on fresh environments seeded from (seed, stream).
EvalResult evaluate(const ExperimentConfig& cfg, const agents::AgentNets& nets, nn::ConstParams params,
                    std::uint64_t seed, std::uint64_t stream, int episodes);

/// One learner step. A TrainingError leaves a diagnostic bundle (parameters
/// before the step, the offending batch, the error) in `diag_dir` and is
/// rethrown.
agents::LearnerMetrics guarded_update(AgentState& agent, std::span<const agents::Trajectory> batch,
                                      const std::filesystem::path& diag_dir, const RunStamp& stamp);

std::vector<std::string> metrics_columns();
std::vector<std::string> metrics_row(std::int64_t step, std::int64_t wall_ms, const agents::LearnerMetrics& m,
                                     bool has_model);

struct TrainResult {
  std::filesystem::path dir;
  std::int64_t steps = 0;
  std::int64_t updates = 0;
  std::vector<EvalResult> evals;
  std::filesystem::path final_checkpoint;
};

/// Trains one agent for cfg.steps agent steps. Writes config.cfg,
/// metrics.csv, eval.csv and checkpoints/ under cfg.out.
TrainResult train(const ExperimentConfig& cfg);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string config_echo(const ExperimentConfig& cfg);

}  // namespace drl::harness
