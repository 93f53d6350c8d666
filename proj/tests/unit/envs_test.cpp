#include <gtest/gtest.h>

#include <cmath>

#include "drl/core/errors.hpp"
#include "drl/envs/delay.hpp"
#include "drl/envs/make_env.hpp"
#include "drl/envs/minimelee.hpp"
#include "drl/envs/worlds.hpp"

namespace drl::envs {
namespace {

using melee_action::kAttack;
using melee_action::kShield;

TEST(ReactionTime, PublishedFigures) {
  const auto atari = reaction_time_ms(5, 4);
  EXPECT_EQ(atari.frames, 20);
  EXPECT_EQ(std::lround(atari.milliseconds), 333);
  const auto melee = reaction_time_ms(1, 3);
  EXPECT_EQ(melee.frames, 3);
  EXPECT_EQ(std::lround(melee.milliseconds), 50);
  EXPECT_EQ(std::lround(reaction_time_ms(15, 1).milliseconds), 250);
  EXPECT_EQ(std::lround(reaction_time_ms(1, 1).milliseconds), 17);
}

TEST(ReactionTime, AverageAddsHalfTheSkip) {
  const auto r = reaction_time_ms(2, 3);
  EXPECT_DOUBLE_EQ(r.average_milliseconds, (6 + 1.0) * 1000.0 / 60.0);
  EXPECT_DOUBLE_EQ(reaction_time_ms(0, 1).milliseconds, 0.0);
  EXPECT_THROW(reaction_time_ms(1, 0), ContractViolation);
  EXPECT_THROW(reaction_time_ms(-1, 1), ContractViolation);
}

TEST(DelayQueue, ZeroDelayExecutesImmediately) {
  DelayQueue q(0);
  EXPECT_EQ(q.push(Action{3}), Action{3});
  EXPECT_TRUE(q.snapshot().empty());
}

TEST(DelayQueue, FifoSemantics) {
  DelayQueue q(2);
  q.push(Action{1});
  q.push(Action{2});
  EXPECT_EQ(q.snapshot(), (std::vector<Action>{Action{1}, Action{2}}));
  EXPECT_EQ(q.push(Action{3}), Action{1});
  EXPECT_EQ(q.snapshot(), (std::vector<Action>{Action{2}, Action{3}}));
}

TEST(DelayQueue, StartsWithNoops) {
  DelayQueue q(3);
  std::vector<Action> executed;
  for (int c = 0; c < 6; ++c) executed.push_back(q.push(Action{c + 1}));
  EXPECT_EQ(executed, (std::vector<Action>{kNoop, kNoop, kNoop, Action{1}, Action{2}, Action{3}}));
  q.clear();
  EXPECT_EQ(q.snapshot(), (std::vector<Action>(3, kNoop)));
  EXPECT_THROW(DelayQueue(-1), ContractViolation);
}

std::unique_ptr<Environment> single(const std::string& name, std::uint64_t seed) {
  EnvParams p;
  if (name == "gridworld") p = {{"width", 4}, {"height", 3}, {"slip", 0.2}, {"max_steps", 60}};
  if (name == "chain") p = {{"n", 6}, {"max_steps", 40}};
  if (name == "mountaincar") p = {{"max_steps", 200}};
  return make_single_env(name, p, RngStream(seed, 3));
}

TEST(DelayedEnv, ExecutedIsChosenDStepsEarlier) {
  for (const std::string name : {"chain", "gridworld", "mountaincar"}) {
    for (int d : {0, 1, 3, 5}) {
      RngStream rng(9, static_cast<std::uint64_t>(d));
      DelayedEnv env(single(name, 1), d, 1);
      std::vector<Action> chosen;
      int t_in_episode = 0;
      env.reset(rng);
      for (int t = 0; t < 10000; ++t) {
        const Action a{rng.uniform_int(env.n_actions())};
        chosen.push_back(a);
        const auto s = env.step(a);
        const int k = static_cast<int>(chosen.size()) - 1;
        if (t_in_episode >= d) {
          ASSERT_EQ(s.executed, chosen[static_cast<std::size_t>(k - d)]) << name << " d=" << d << " t=" << t;
        } else {
          ASSERT_EQ(s.executed, kNoop);
        }
        ASSERT_EQ(static_cast<int>(s.queue.size()), d);
        ++t_in_episode;
        if (s.terminal) {
          env.reset(rng);
          chosen.clear();
          t_in_episode = 0;
        }
      }
    }
  }
}

TEST(DelayedEnv, TwoPlayerQueuesAreIndependent) {
  RngStream rng(4, 0);
  DelayedTwoPlayerEnv env(make_two_player_env("minimelee", {}, rng), 4, 1, 1);
  env.reset(rng);
  std::vector<Action> ca, cb;
  for (int t = 0; t < 10000; ++t) {
    ca.push_back(Action{rng.uniform_int(5)});
    cb.push_back(Action{rng.uniform_int(5)});
    const auto s = env.step(ca.back(), cb.back());
    const auto k = ca.size() - 1;
    ASSERT_EQ(s.executed_a, k >= 4 ? ca[k - 4] : kNoop);
    ASSERT_EQ(s.executed_b, k >= 1 ? cb[k - 1] : kNoop);
    ASSERT_EQ(s.reward_a + s.reward_b, 0.0);
    if (s.terminal) {
      env.reset(rng);
      ca.clear();
      cb.clear();
    }
  }
}

TEST(DelayedEnv, ZeroDelayMatchesInnerEnvironment) {
  for (const std::string name : {"chain", "gridworld", "mountaincar"}) {
    auto inner = single(name, 5);
    DelayedEnv wrapped(single(name, 5), 0, 1);
    RngStream r1(2, 2), r2(2, 2), acts(3, 3);
    EXPECT_EQ(inner->reset(r1), wrapped.reset(r2));
    for (int t = 0; t < 500; ++t) {
      const Action a{acts.uniform_int(inner->n_actions())};
      const auto x = inner->step(a);
      const auto y = wrapped.step(a);
      ASSERT_EQ(x.state, y.state);
      ASSERT_EQ(x.reward, y.reward);
      ASSERT_EQ(x.terminal, y.terminal);
      if (x.terminal) {
        EXPECT_EQ(inner->reset(r1), wrapped.reset(r2));
      }
    }
  }
}

TEST(DelayedEnv, FrameSkipRepeatsAndSumsRewards) {
  // Mountain car pays -1 per frame, so f frames per agent step pay -f.
  RngStream rng(1, 1);
  DelayedEnv env(single("mountaincar", 1), 0, 3);
  env.reset(rng);
  const auto s = env.step(Action{2});
  EXPECT_EQ(s.reward, -3.0);

  // Repeating "right" three times on a chain moves three cells.
  DelayedEnv chain(single("chain", 1), 0, 3);
  chain.reset(rng);
  const auto c = chain.step(ChainWorld::kRight);
  EXPECT_EQ(c.state.categorical[0].index, 3);
}

TEST(DelayedEnv, StepAfterTerminalIsContractViolation) {
  RngStream rng(1, 1);
  DelayedEnv env(make_single_env("chain", {{"n", 2}}, rng), 0, 1);
  env.reset(rng);
  EXPECT_TRUE(env.step(ChainWorld::kRight).terminal);
  EXPECT_THROW(env.step(ChainWorld::kRight), ContractViolation);
  DelayedEnv fresh(make_single_env("chain", {}, rng), 1, 1);
  EXPECT_THROW(fresh.step(kNoop), ContractViolation);
}

TEST(MakeEnv, RosterAndErrors) {
  RngStream rng(1, 1);
  auto chain = make_single_env("chain", {{"n", 5}}, rng);
  EXPECT_EQ(chain->n_actions(), 2);
  EXPECT_EQ(chain->schema().categorical_cards, std::vector<int>{5});
  auto melee = make_two_player_env("minimelee", {}, rng);
  EXPECT_EQ(melee->schema().n_continuous, 8);
  EXPECT_EQ(melee->schema().categorical_cards, (std::vector<int>{6, 6}));
  EXPECT_EQ(melee->n_actions(), 5);
  EXPECT_THROW(make_env("pong", {}, rng), UsageError);
  EXPECT_THROW(make_env("chain", {{"width", 3}}, rng), UsageError);
  EXPECT_THROW(make_single_env("minimelee", {}, rng), UsageError);
  EXPECT_THROW(make_two_player_env("chain", {}, rng), UsageError);
}

TEST(Chain, RewardOnlyOnEnteringGoal) {
  RngStream rng(1, 1);
  ChainWorld w(5, 100);
  w.reset(rng);
  EXPECT_EQ(w.step(ChainWorld::kLeft).reward, 0.0);
  EXPECT_EQ(w.cell(), 0);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(w.step(ChainWorld::kRight).reward, 0.0);
  const auto last = w.step(ChainWorld::kRight);
  EXPECT_EQ(last.reward, 1.0);
  EXPECT_TRUE(last.terminal);
}

TEST(Gridworld, DeterministicWithoutSlip) {
  for (int cell = 0; cell < 12; ++cell) {
    for (int a = 0; a < 5; ++a) {
      const auto t = GridWorld::transition(4, 3, 0.0, cell, Action{a});
      ASSERT_EQ(t.size(), 1u);
      EXPECT_EQ(t[0].second, 1.0);
    }
  }
}

TEST(Gridworld, MildlyStochastic) {
  for (double eps : {0.1, 0.3}) {
    for (int cell = 0; cell < 12; ++cell) {
      for (int a = 0; a < 5; ++a) {
        double best = 0.0, total = 0.0;
        for (const auto& [next, p] : GridWorld::transition(4, 3, eps, cell, Action{a})) {
          best = std::max(best, p);
          total += p;
        }
        EXPECT_GE(best, 1.0 - eps - 1e-12);
        EXPECT_NEAR(total, 1.0, 1e-12);
      }
    }
  }
}

TEST(Gridworld, SampledSlipMatchesTransitionTable) {
  GridWorld w(4, 3, 0.3, 1000000, RngStream(5, 5));
  RngStream rng(1, 1);
  w.reset(rng);
  const int n = 40000;
  int stayed = 0;
  for (int i = 0; i < n; ++i) {
    w.reset(rng);
    const auto s = w.step(Action{3});  // left from the corner: blocked unless slipped up or right
    stayed += s.state.categorical[0].index == 0;
  }
  double expect = 0.0;
  for (const auto& [next, p] : GridWorld::transition(4, 3, 0.3, 0, Action{3})) {
    if (next == 0) expect = p;
  }
  EXPECT_NEAR(static_cast<double>(stayed) / n, expect, 0.01);
}

TEST(MountainCar, ClassicDynamics) {
  MountainCar car(1000);
  RngStream rng(1, 1);
  car.reset(rng);
  const double x0 = car.position();
  EXPECT_GE(x0, -0.6);
  EXPECT_LE(x0, -0.4);
  car.step(Action{2});
  const double v = 0.001 - 0.0025 * std::cos(3.0 * x0);
  EXPECT_NEAR(car.velocity(), v, 1e-15);
  EXPECT_NEAR(car.position(), x0 + v, 1e-15);
}

MiniMelee melee_at(Fighter a, Fighter b) {
  MiniMelee m;
  RngStream rng(1, 1);
  m.reset(rng);
  m.set_fighters(a, b);
  return m;
}

TEST(MiniMelee, NoopAtSpawnChangesNothing) {
  MiniMelee m;
  RngStream rng(1, 1);
  m.reset(rng);
  const auto before = m.observe(0);
  const auto r = m.step(kNoop, kNoop);
  EXPECT_EQ(r.reward_a, 0.0);
  EXPECT_EQ(r.reward_b, 0.0);
  EXPECT_EQ(m.fighter(0).x, -2.0);
  EXPECT_EQ(m.fighter(1).x, 2.0);
  EXPECT_EQ(m.observe(0), before);
}

TEST(MiniMelee, ActiveAttackHits) {
  auto m = melee_at(Fighter{0.0, 0.0, 0.0, 1.0, Anim::active, 1}, Fighter{0.5, 0.0, 0.0, -1.0, Anim::idle, 0});
  const auto r = m.step(kNoop, kNoop);
  EXPECT_DOUBLE_EQ(r.reward_a, 0.1);
  EXPECT_DOUBLE_EQ(r.reward_b, -0.1);
  EXPECT_EQ(m.fighter(1).anim, Anim::stunned);
  EXPECT_EQ(m.fighter(1).damage, 10.0);
  EXPECT_TRUE(m.last_events().hit[1]);
}

TEST(MiniMelee, ShieldBlocksAndRangeLimits) {
  auto shielded = melee_at(Fighter{0.0, 0.0, 0.0, 1.0, Anim::active, 1}, Fighter{0.5, 0.0, 0.0, -1.0, Anim::idle, 0});
  EXPECT_EQ(shielded.step(kNoop, kShield).reward_a, 0.0);
  EXPECT_EQ(shielded.fighter(1).damage, 0.0);
  auto far = melee_at(Fighter{0.0, 0.0, 0.0, 1.0, Anim::active, 1}, Fighter{1.5, 0.0, 0.0, -1.0, Anim::idle, 0});
  EXPECT_EQ(far.step(kNoop, kNoop).reward_a, 0.0);
}

TEST(MiniMelee, KnockoutPaysDamageAndKo) {
  auto m = melee_at(Fighter{0.0, 0.0, 0.0, 1.0, Anim::active, 1}, Fighter{0.5, 0.0, 95.0, -1.0, Anim::idle, 0});
  const auto r = m.step(kNoop, kNoop);
  EXPECT_DOUBLE_EQ(r.reward_a, 1.1);
  EXPECT_DOUBLE_EQ(r.reward_b, -1.1);
  EXPECT_EQ(m.kos(1), 1);
  EXPECT_EQ(m.fighter(0).x, -2.0);
  EXPECT_EQ(m.fighter(1).x, 2.0);
  EXPECT_EQ(m.fighter(1).damage, 0.0);
}

TEST(MiniMelee, AttackAnimationTimings) {
  MiniMelee m;
  RngStream rng(1, 1);
  m.reset(rng);
  m.step(kAttack, kNoop);
  std::vector<Anim> seen{m.fighter(0).anim};
  for (int i = 0; i < 5; ++i) {
    m.step(kNoop, kNoop);
    seen.push_back(m.fighter(0).anim);
  }
  EXPECT_EQ(seen, (std::vector<Anim>{Anim::startup, Anim::startup, Anim::active, Anim::recovery, Anim::recovery,
                                     Anim::idle}));
}

TEST(MiniMelee, MalformedBookkeepingRejected) {
  MiniMelee m;
  RngStream rng(1, 1);
  m.reset(rng);
  EXPECT_THROW(m.set_fighters(Fighter{0, 0, 0, 1.0, Anim::idle, 2}, Fighter{}), ContractViolation);
  EXPECT_THROW(m.set_fighters(Fighter{0, 0, 0, 1.0, Anim::startup, 0}, Fighter{}), ContractViolation);
  EXPECT_THROW(m.set_fighters(Fighter{0, 0, 0, 1.0, Anim::stunned, 9}, Fighter{}), ContractViolation);
  EXPECT_THROW(m.set_fighters(Fighter{0, 0, 0, 0.5, Anim::idle, 0}, Fighter{}), ContractViolation);
}

TEST(MiniMelee, ZeroSumOverRandomEpisodes) {
  RngStream rng(8, 8);
  for (int e = 0; e < 20; ++e) {
    MiniMelee m;
    m.reset(rng);
    double sum = 0.0;
    for (;;) {
      const auto r = m.step(Action{rng.uniform_int(5)}, Action{rng.uniform_int(5)});
      ASSERT_EQ(r.reward_a, -r.reward_b);
      sum += r.reward_a + r.reward_b;
      if (r.terminal) break;
    }
    EXPECT_EQ(sum, 0.0);
    EXPECT_EQ(m.steps(), 1000);
  }
}

TEST(MiniMelee, MirroredViewIsSymmetric) {
  // Each player sees itself first, facing the other at +x, and "right" walks towards the enemy.
  MiniMelee m;
  RngStream rng(1, 1);
  m.reset(rng);
  EXPECT_EQ(m.observe(0), m.observe(1));
  m.step(melee_action::kRight, melee_action::kRight);
  EXPECT_EQ(m.observe(0), m.observe(1));
  EXPECT_NEAR(m.fighter(1).x - m.fighter(0).x, 3.6, 1e-12);
}

}  // namespace
}  // namespace drl::envs
