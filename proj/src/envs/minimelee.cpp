#include "drl/envs/minimelee.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "drl/core/errors.hpp"

namespace drl::envs {

MiniMelee::MiniMelee(MeleeRules rules) : rules_(rules), schema_{8, {kAnimCount, kAnimCount}} {
  require(rules_.max_steps >= 1, "minimelee: max_steps must be positive");
  require(rules_.startup_steps >= 1 && rules_.active_steps >= 1 && rules_.recovery_steps >= 1 &&
              rules_.stun_steps >= 1,
          "minimelee: animation lengths must be positive");
}

void MiniMelee::respawn() {
  fighters_[0] = Fighter{-rules_.spawn_offset, 0.0, 0.0, 1.0, Anim::idle, 0};
  fighters_[1] = Fighter{rules_.spawn_offset, 0.0, 0.0, -1.0, Anim::idle, 0};
}

MixedState MiniMelee::reset(RngStream&) {
  respawn();
  events_ = {};
  kos_ = {};
  steps_ = 0;
  done_ = false;
  return observe(0);
}

void MiniMelee::check_fighter(const Fighter& f) const {
  const int anim = static_cast<int>(f.anim);
  require(anim >= 0 && anim < kAnimCount, "minimelee: unknown animation state");
  if (f.actionable()) {
    require(f.timer == 0, "minimelee: idle/walk fighter carries an animation timer");
  } else {
    int limit = 0;
    switch (f.anim) {
      case Anim::startup: limit = rules_.startup_steps; break;
      case Anim::active: limit = rules_.active_steps; break;
      case Anim::recovery: limit = rules_.recovery_steps; break;
      case Anim::stunned: limit = rules_.stun_steps; break;
      default: break;
    }
    require(f.timer >= 1 && f.timer <= limit,
            "minimelee: animation timer " + std::to_string(f.timer) + " out of range");
  }
  require(std::isfinite(f.x) && std::isfinite(f.velocity) && std::isfinite(f.damage),
          "minimelee: non-finite fighter state");
  require(f.facing == 1.0 || f.facing == -1.0, "minimelee: facing must be +1 or -1");
}

void MiniMelee::set_fighters(const Fighter& a, const Fighter& b) {
  check_fighter(a);
  check_fighter(b);
  fighters_ = {a, b};
  done_ = false;
}

TwoPlayerStep MiniMelee::step(Action a, Action b) {
  require(!done_, "minimelee: step after terminal");
  require(a.index >= 0 && a.index < 5 && b.index >= 0 && b.index < 5, "minimelee: action out of range");
  // Player 1 acts in its mirrored frame: its "left" walks towards +x.
  const auto mirror = [](Action act) { return act.index == 1 ? Action{2} : act.index == 2 ? Action{1} : act; };
  const std::array<Action, 2> actions{a, mirror(b)};
  for (const auto& f : fighters_) check_fighter(f);

  events_ = {};
  std::array<bool, 2> shielding{};
  for (int i = 0; i < 2; ++i) {
    shielding[i] = fighters_[i].actionable() && actions[i] == melee_action::kShield;
  }

  const double gap = std::abs(fighters_[0].x - fighters_[1].x);
  for (int i = 0; i < 2; ++i) {
    const int j = 1 - i;
    events_.hit[j] = fighters_[i].anim == Anim::active && gap <= rules_.hit_range && !shielding[j];
  }

  std::array<double, 2> dealt{};
  for (int i = 0; i < 2; ++i) {
    const int j = 1 - i;
    if (events_.hit[j]) dealt[i] = rules_.hit_damage;
  }

  std::array<Fighter, 2> next = fighters_;
  for (int i = 0; i < 2; ++i) {
    const int j = 1 - i;
    Fighter& f = next[i];
    if (events_.hit[i]) {
      f.damage += rules_.hit_damage;
      f.anim = Anim::stunned;
      f.timer = rules_.stun_steps;
      double away = fighters_[i].x - fighters_[j].x;
      double dir = away > 0.0 ? 1.0 : (away < 0.0 ? -1.0 : fighters_[j].facing);
      f.velocity = rules_.knockback_speed * dir;
      continue;
    }
    if (f.actionable()) {
      switch (actions[i].index) {
        case 1:
          f.velocity = -rules_.walk_speed;
          f.facing = -1.0;
          f.anim = Anim::walk;
          break;
        case 2:
          f.velocity = rules_.walk_speed;
          f.facing = 1.0;
          f.anim = Anim::walk;
          break;
        case 3:
          f.velocity = 0.0;
          f.anim = Anim::startup;
          f.timer = rules_.startup_steps;
          break;
        default:  // noop and shield both stand still
          f.velocity = 0.0;
          f.anim = Anim::idle;
          break;
      }
      continue;
    }
    if (--f.timer == 0) {
      switch (f.anim) {
        case Anim::startup:
          f.anim = Anim::active;
          f.timer = rules_.active_steps;
          break;
        case Anim::active:
          f.anim = Anim::recovery;
          f.timer = rules_.recovery_steps;
          break;
        default:  // recovery and stunned return to idle
          f.anim = Anim::idle;
          f.timer = 0;
          f.velocity = 0.0;
          break;
      }
    }
  }
  for (auto& f : next) {
    f.x = std::clamp(f.x + f.velocity, -rules_.arena_half_width, rules_.arena_half_width);
  }
  fighters_ = next;

  TwoPlayerStep out;
  out.reward_a = rules_.damage_reward * (dealt[0] - dealt[1]);
  for (int i = 0; i < 2; ++i) {
    events_.ko[i] = events_.hit[i] && fighters_[i].damage > rules_.ko_threshold;
  }
  for (int i = 0; i < 2; ++i) kos_[i] += events_.ko[i] ? 1 : 0;
  if (events_.ko[1]) out.reward_a += rules_.ko_reward;
  if (events_.ko[0]) out.reward_a -= rules_.ko_reward;
  out.reward_b = -out.reward_a;
  if (events_.ko[0] || events_.ko[1]) respawn();

  ++steps_;
  done_ = steps_ >= rules_.max_steps;
  out.terminal = done_;
  out.state = observe(0);
  return out;
}

MixedState MiniMelee::observe(int player) const {
  require(player == 0 || player == 1, "minimelee: player must be 0 or 1");
  const double sign = player == 0 ? 1.0 : -1.0;
  const Fighter& self = fighters_[player];
  const Fighter& other = fighters_[1 - player];
  MixedState s;
  for (const Fighter* f : {&self, &other}) {
    s.continuous.push_back(sign * f->x);
    s.continuous.push_back(sign * f->velocity);
    s.continuous.push_back(f->damage * rules_.damage_scale);
    s.continuous.push_back(sign * f->facing);
  }
  s.categorical.push_back({kAnimCount, static_cast<int>(self.anim)});
  s.categorical.push_back({kAnimCount, static_cast<int>(other.anim)});
  return s;
}

}  // namespace drl::envs
