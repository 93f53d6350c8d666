#include "drl/harness/scripted.hpp"

#include <cmath>

#include "drl/core/errors.hpp"

namespace drl::harness {

using envs::Anim;
namespace act = envs::melee_action;

ScriptedOpponent::ScriptedOpponent(OpponentConfig config, RngStream rng) : config_(config), rng_(rng) {}

void ScriptedOpponent::reset() { seen_.clear(); }

Action ScriptedOpponent::rule(const MixedState& o) const {
  require(o.continuous.size() == 8 && o.categorical.size() == 2, "scripted opponent: not a mini-melee observation");
  const auto self_anim = static_cast<Anim>(o.categorical[0].index);
  const auto enemy_anim = static_cast<Anim>(o.categorical[1].index);
  if (self_anim != Anim::idle && self_anim != Anim::walk) return act::kNoop;
  const double dx = o.continuous[4] - o.continuous[0];
  const double dist = std::abs(dx);
  if (config_.shield && dist <= config_.range && (enemy_anim == Anim::startup || enemy_anim == Anim::active)) {
    return act::kShield;
  }
  if (dist <= config_.range) return act::kAttack;
  return dx > 0.0 ? act::kRight : act::kLeft;
}

Action ScriptedOpponent::act(const MixedState& observation) {
  seen_.push_back(observation);
  while (static_cast<int>(seen_.size()) > config_.delay + 1) seen_.pop_front();
  if (config_.epsilon > 0.0 && rng_.uniform() < config_.epsilon) return Action{rng_.uniform_int(5)};
  return rule(seen_.front());
}

ScriptedVersusEnv::ScriptedVersusEnv(std::unique_ptr<envs::TwoPlayerEnv> game, ScriptedOpponent opponent)
    : game_(std::move(game)), opponent_(std::move(opponent)) {
  require(game_ != nullptr, "scripted env: null game");
}

MixedState ScriptedVersusEnv::reset(RngStream& rng) {
  opponent_.reset();
  return game_->reset(rng);
}

envs::StepResult ScriptedVersusEnv::step(Action action) {
  const Action other = opponent_.act(game_->observe(1));
  const auto r = game_->step(action, other);
  return {r.state, r.reward_a, r.terminal};
}

}  // namespace drl::harness
