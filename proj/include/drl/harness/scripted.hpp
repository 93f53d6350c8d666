#pragma once

#include <deque>
#include <memory>

#include "drl/envs/minimelee.hpp"
#include "drl/harness/experiment.hpp"

namespace drl::harness {

/// Rule-based mini-melee player. It reacts to what it saw `delay` steps ago:
/// shields when the enemy's attack is coming within range, attacks when in
/// range, otherwise walks towards the enemy. With probability epsilon it
/// presses a random button instead.
class ScriptedOpponent {
 public:
  ScriptedOpponent(OpponentConfig config, RngStream rng);

  void reset();
  /// `observation` is the opponent's own egocentric view.
  Action act(const MixedState& observation);
  /// The rule table on one (already delayed) observation, without noise.
  Action rule(const MixedState& observation) const;

 private:
  OpponentConfig config_;
  RngStream rng_;
  std::deque<MixedState> seen_;
};

/// Mini-melee as a single-agent environment: the agent is player 0 and the
/// scripted opponent plays player 1 every frame.
class ScriptedVersusEnv : public envs::Environment {
 public:
  ScriptedVersusEnv(std::unique_ptr<envs::TwoPlayerEnv> game, ScriptedOpponent opponent);

  const StateSchema& schema() const override { return game_->schema(); }
  int n_actions() const override { return game_->n_actions(); }
  std::string name() const override { return game_->name(); }
  MixedState reset(RngStream& rng) override;
  envs::StepResult step(Action action) override;

  envs::TwoPlayerEnv& game() { return *game_; }

 private:
  std::unique_ptr<envs::TwoPlayerEnv> game_;
  ScriptedOpponent opponent_;
};

}  // namespace drl::harness
