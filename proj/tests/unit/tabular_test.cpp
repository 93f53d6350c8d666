#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "drl/core/errors.hpp"
#include "drl/tabular/mdp.hpp"

namespace drl::tabular {
namespace {

TEST(ValueIteration, SingleStateGeometricSeries) {
  TabularMDP m(1, 1, 0.5);
  m.set(0, 0, {{0, 1.0}}, 1.0);
  const auto sol = value_iteration(m);
  EXPECT_NEAR(sol.values[0], 2.0, 1e-9);
  EXPECT_LT(sol.residual, 1e-10);
}

TEST(ValueIteration, ChainClosedForm) {
  const auto m = chain_mdp(5, 0.9);
  const auto sol = value_iteration(m);
  EXPECT_NEAR(sol.values[3], 1.0, 1e-9);
  EXPECT_NEAR(sol.values[2], 0.9, 1e-9);
  EXPECT_NEAR(sol.values[1], 0.81, 1e-9);
  EXPECT_NEAR(sol.values[0], 0.729, 1e-9);
  EXPECT_NEAR(sol.values[4], 0.0, 1e-12);
  for (int s = 0; s < 4; ++s) EXPECT_EQ(sol.policy[static_cast<std::size_t>(s)], 1);
  // Absorbing goal: both actions tie, lowest index wins.
  EXPECT_EQ(sol.policy[4], 0);
}

TEST(ValueIteration, GreedyPolicyAchievesOptimumOnDeterministicMdps) {
  for (const auto& m : {chain_mdp(6, 0.9), gridworld_mdp(4, 3, 0.0, 0.9)}) {
    const auto sol = value_iteration(m);
    const auto v = policy_evaluation(m, sol.policy);
    for (std::size_t s = 0; s < v.size(); ++s) EXPECT_NEAR(v[s], sol.values[s], 1e-9);
  }
}

TEST(TabularMdp, ValidateRejectsBadRows) {
  TabularMDP m(2, 1, 0.9);
  m.set(0, 0, {{1, 0.5}}, 0.0);
  m.set(1, 0, {{1, 1.0}}, 0.0);
  EXPECT_THROW(m.validate(), ContractViolation);
  m.set(0, 0, {{1, 1.0}}, std::numeric_limits<double>::infinity());
  EXPECT_THROW(m.validate(), ContractViolation);
}

TEST(TabularMdp, ModeTiesGoToLowestState) {
  TabularMDP m(3, 1, 0.9);
  m.set(0, 0, {{2, 0.4}, {1, 0.4}, {0, 0.2}}, 0.0);
  EXPECT_EQ(m.mode(0, 0), 1);
}

TEST(Augment, StateCount) {
  EXPECT_EQ(augmented_state_count(10, 2, 3), 80u);
  const auto a = augment(chain_mdp(10, 0.9), 3);
  EXPECT_EQ(a.mdp.n_states, 80);
  EXPECT_EQ(a.mdp.n_actions, 2);
}

TEST(Augment, GuardRejectsLargeQueues) {
  EXPECT_EQ(augmented_state_count(1, 30, 7), 21'870'000'000u);
  EXPECT_EQ(augmented_state_count(10, 30, 40), std::numeric_limits<std::uint64_t>::max());
  TabularMDP m(1, 30, 0.9);
  for (int a = 0; a < 30; ++a) m.set(0, a, {{0, 1.0}}, 0.0);
  EXPECT_THROW(augment(m, 7), ResourceError);
}

TEST(Augment, ZeroDelayIsBase) {
  const auto base = gridworld_mdp(3, 3, 0.2, 0.9);
  const auto a = augment(base, 0);
  EXPECT_EQ(a.mdp.n_states, base.n_states);
  EXPECT_EQ(a.mdp.rewards, base.rewards);
  for (std::size_t i = 0; i < base.transitions.size(); ++i) {
    ASSERT_EQ(a.mdp.transitions[i].size(), base.transitions[i].size());
    for (std::size_t k = 0; k < base.transitions[i].size(); ++k) {
      EXPECT_EQ(a.mdp.transitions[i][k].next, base.transitions[i][k].next);
      EXPECT_EQ(a.mdp.transitions[i][k].prob, base.transitions[i][k].prob);
    }
  }
}

TEST(Augment, ExecutesOldestAndAppends) {
  const auto base = chain_mdp(4, 0.9);
  const auto a = augment(base, 2);
  const std::vector<Action> q{Action{1}, Action{0}};
  const int i = a.index(1, q);
  EXPECT_EQ(a.base_state(i), 1);
  EXPECT_EQ(a.queue(i), q);
  const auto& nx = a.mdp.next(i, 1);
  ASSERT_EQ(nx.size(), 1u);
  EXPECT_EQ(a.base_state(nx[0].next), 2);
  EXPECT_EQ(a.queue(nx[0].next), (std::vector<Action>{Action{0}, Action{1}}));
  EXPECT_EQ(a.mdp.reward(i, 0), base.reward(1, 1));
  // Cell 2 plus "right" reaches the goal regardless of the new action.
  const int j = a.index(2, std::vector<Action>{Action{1}, Action{1}});
  EXPECT_EQ(a.mdp.reward(j, 0), 1.0);
  EXPECT_EQ(a.mdp.reward(j, 1), 1.0);
}

TEST(Augment, EnumerationRoundTrips) {
  const auto a = augment(gridworld_mdp(3, 2, 0.1, 0.9), 2);
  for (int i = 0; i < a.mdp.n_states; ++i) EXPECT_EQ(a.index(a.base_state(i), a.queue(i)), i);
}

TEST(Augment, ValuesInvariantUnderQueueRelabeling) {
  // Reversing the action labels inside the base MDP permutes queue tuples;
  // values must follow the permutation.
  const auto base = gridworld_mdp(3, 3, 0.2, 0.9);
  TabularMDP flipped(base.n_states, base.n_actions, base.gamma);
  const auto relabel = [&](int act) { return act == 0 ? 0 : base.n_actions - act; };
  for (int s = 0; s < base.n_states; ++s)
    for (int act = 0; act < base.n_actions; ++act)
      flipped.set(s, relabel(act), base.next(s, act), base.reward(s, act));
  const auto a = augment(base, 2);
  const auto b = augment(flipped, 2);
  const auto va = value_iteration(a.mdp).values;
  const auto vb = value_iteration(b.mdp).values;
  for (int i = 0; i < a.mdp.n_states; ++i) {
    auto q = a.queue(i);
    for (auto& x : q) x = Action{relabel(x.index)};
    EXPECT_NEAR(va[static_cast<std::size_t>(i)], vb[static_cast<std::size_t>(b.index(a.base_state(i), q))], 1e-9);
  }
}

TEST(Mbs, ZeroDelayIsUndelayedOptimum) {
  const auto base = gridworld_mdp(4, 3, 0.3, 0.9);
  EXPECT_EQ(mbs_policy(base, 0), value_iteration(base).policy);
}

TEST(Mbs, DeterministicMdpsMatchAugmentedOptimum) {
  for (const auto& base : {chain_mdp(5, 0.9), chain_mdp(8, 0.9), gridworld_mdp(3, 3, 0.0, 0.9),
                           gridworld_mdp(4, 3, 0.0, 0.9)}) {
    for (int d = 0; d <= 3; ++d) {
      const auto c = compare_mbs(base, d);
      EXPECT_EQ(c.policy_mismatches, 0) << "d = " << d;
      EXPECT_LT(c.max_value_gap, 1e-9);
      EXPECT_EQ(c.mbs, c.optimal_policy);
    }
  }
}

TEST(Mbs, MildlyStochasticGridWithinFivePercent) {
  const auto c = compare_mbs(gridworld_mdp(4, 3, 0.3, 0.99), 2);
  EXPECT_GT(c.start_value_optimal, 0.0);
  EXPECT_GE(c.start_value_optimal, c.start_value_mbs - 1e-9);
  EXPECT_LT((c.start_value_optimal - c.start_value_mbs) / c.start_value_optimal, 0.05);
}

TEST(Mbs, ActionSimulatesQueueAlongModes) {
  const auto base = chain_mdp(6, 0.9);
  const auto pi = value_iteration(base).policy;
  // Queue drives the agent to the goal; the goal's greedy action is 0.
  EXPECT_EQ(mbs_action(base, pi, 3, std::vector<Action>{Action{1}, Action{1}}), 0);
  EXPECT_EQ(mbs_action(base, pi, 3, std::vector<Action>{Action{0}, Action{0}}), 1);
}

TEST(Oracle, JsonCarriesTablesOnRequest) {
  const auto c = compare_mbs(chain_mdp(4, 0.9), 1);
  const auto with = to_json(c, true);
  const auto without = to_json(c, false);
  EXPECT_EQ(with.at("augmented_states").get<int>(), 8);
  EXPECT_TRUE(with.contains("mbs_values"));
  EXPECT_FALSE(without.contains("mbs_values"));
}

}  // namespace
}  // namespace drl::tabular
