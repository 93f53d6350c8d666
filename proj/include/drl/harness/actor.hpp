#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "drl/agents/agent.hpp"
#include "drl/agents/trajectory.hpp"
#include "drl/envs/delay.hpp"

namespace drl::harness {

/// One delayed environment driven by an agent's policy. Records trajectory
/// steps (observed state, queue, core state) exactly as the learner will
/// rebuild them.
class Actor {
 public:
  Actor(std::unique_ptr<envs::Environment> env, const agents::AgentConfig& config, RngStream env_rng,
        RngStream policy_rng, bool collect = true);

  struct Step {
    std::optional<agents::Trajectory> trajectory;
    bool episode_done = false;
    double episode_return = 0.0;  // valid when episode_done
  };

  Step step(const agents::AgentNets& nets, nn::ConstParams params, bool greedy = false);
  /// Plays one full episode and returns its return.
  double episode(const agents::AgentNets& nets, nn::ConstParams params, bool greedy = false);

 private:
  void begin(const agents::AgentNets& nets);

  envs::DelayedEnv env_;
  RngStream env_rng_;
  RngStream policy_rng_;
  bool collect_;
  agents::TrajectoryBuilder builder_;
  bool fresh_ = true;
  MixedState state_;
  std::vector<Action> queue_;
  nn::Vec hidden_;
  double return_ = 0.0;
};

/// Per-player bookkeeping for two-player delayed play.
struct Seat {
  Seat(const agents::AgentConfig& config, RngStream policy_rng, bool collect);

  void begin(const agents::AgentNets& nets, const MixedState& state, std::vector<Action> queue);
  /// Chooses the next action; `record` is finished by `observe`.
  Action choose(const agents::AgentNets& nets, nn::ConstParams params, bool greedy);
  std::optional<agents::Trajectory> observe(Action executed, double reward, const MixedState& next,
                                            std::vector<Action> queue, bool terminal);

  RngStream policy_rng;
  bool collect;
  agents::TrajectoryBuilder builder;
  MixedState state;
  std::vector<Action> queue;
  nn::Vec hidden;
  agents::TrajectoryStep pending;
  nn::Vec hidden_next;
  double episode_return = 0.0;
};

}  // namespace drl::harness
