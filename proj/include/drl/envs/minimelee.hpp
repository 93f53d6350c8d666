#pragma once

#include <array>
#include <string_view>

#include "drl/envs/environment.hpp"

namespace drl::envs {

/// Rule set "MM-1". All constants live here; changing any of them requires a
/// new version string.
struct MeleeRules {
  static constexpr std::string_view kVersion = "MM-1";

  double arena_half_width = 5.0;
  double walk_speed = 0.2;
  double hit_range = 1.0;
  double hit_damage = 10.0;
  double ko_threshold = 100.0;
  double damage_reward = 0.01;  // per damage point dealt
  double ko_reward = 1.0;
  double spawn_offset = 2.0;
  double knockback_speed = 0.3;
  double damage_scale = 0.01;  // observation feature = damage * scale
  int startup_steps = 2;
  int active_steps = 1;
  int recovery_steps = 2;
  int stun_steps = 3;
  int max_steps = 1000;
};

enum class Anim : int { idle = 0, walk = 1, startup = 2, active = 3, recovery = 4, stunned = 5 };
inline constexpr int kAnimCount = 6;

namespace melee_action {
inline constexpr Action kNoop{0};
inline constexpr Action kLeft{1};
inline constexpr Action kRight{2};
inline constexpr Action kAttack{3};
inline constexpr Action kShield{4};
}  // namespace melee_action

struct Fighter {
  double x = 0.0;
  double velocity = 0.0;
  double damage = 0.0;
  double facing = 1.0;
  Anim anim = Anim::idle;
  int timer = 0;  // steps left in a timed animation, 0 for idle/walk

  bool actionable() const { return anim == Anim::idle || anim == Anim::walk; }
};

struct MeleeEvents {
  std::array<bool, 2> hit{};  // fighter i was hit this step
  std::array<bool, 2> ko{};   // fighter i was knocked out this step
};

/// One-dimensional two-player fighting game.
///
/// Each step: hits are resolved from the animations at the start of the step
/// (an `active` attacker hits an opponent within hit_range unless that
/// opponent is actionable and shielding this step); hit fighters are stunned
/// and knocked back; actionable fighters apply their action; timed
/// animations advance (startup -> active -> recovery -> idle,
/// stunned -> idle); positions integrate and clamp to the arena.
///
/// Observation (8 continuous + 2 categorical of cardinality 6):
/// [x, velocity, damage * damage_scale, facing] for self then opponent,
/// followed by self and opponent animation. Player 1's view is mirrored
/// (x, velocity and facing negated) so both players see themselves first,
/// and its left/right actions are mirrored to match.
class MiniMelee : public TwoPlayerEnv {
 public:
  explicit MiniMelee(MeleeRules rules = {});

  const StateSchema& schema() const override { return schema_; }
  int n_actions() const override { return 5; }
  std::string name() const override { return "minimelee"; }
  MixedState reset(RngStream& rng) override;
  TwoPlayerStep step(Action a, Action b) override;
  MixedState observe(int player) const override;

  const MeleeRules& rules() const { return rules_; }
  const Fighter& fighter(int i) const { return fighters_[i]; }
  /// Places fighters directly (tests, scripted scenarios). Validates the
  /// animation bookkeeping.
  void set_fighters(const Fighter& a, const Fighter& b);
  const MeleeEvents& last_events() const { return events_; }
  /// Times fighter i has been knocked out since reset.
  int kos(int i) const { return kos_[i]; }
  int steps() const { return steps_; }

 private:
  void respawn();
  void check_fighter(const Fighter& f) const;

  MeleeRules rules_;
  StateSchema schema_;
  std::array<Fighter, 2> fighters_;
  MeleeEvents events_;
  std::array<int, 2> kos_{};
  int steps_ = 0;
  bool done_ = true;
};

}  // namespace drl::envs
