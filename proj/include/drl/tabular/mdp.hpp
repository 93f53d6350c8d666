#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "drl/core/types.hpp"

namespace drl::tabular {

struct Transition {
  int next = 0;
  double prob = 0.0;
};

/// Finite MDP with sparse transition lists, indexed by s * n_actions + a.
struct TabularMDP {
  int n_states = 0;
  int n_actions = 0;
  double gamma = 0.9;
  std::vector<std::vector<Transition>> transitions;
  std::vector<double> rewards;

  TabularMDP() = default;
  TabularMDP(int n_states, int n_actions, double gamma);

  std::size_t sa(int s, int a) const { return static_cast<std::size_t>(s) * n_actions + a; }
  const std::vector<Transition>& next(int s, int a) const { return transitions[sa(s, a)]; }
  double reward(int s, int a) const { return rewards[sa(s, a)]; }
  void set(int s, int a, std::vector<Transition> next, double reward);

  /// Probabilities sum to 1 within 1e-12, indices in range, rewards finite.
  void validate() const;
  bool deterministic() const;
  /// Most likely successor; ties go to the lowest state index.
  int mode(int s, int a) const;
};

TabularMDP chain_mdp(int n, double gamma);
TabularMDP gridworld_mdp(int width, int height, double slip, double gamma);

/// n_states * n_actions^d, saturating at UINT64_MAX.
std::uint64_t augmented_state_count(std::uint64_t n_states, std::uint64_t n_actions, int d);

inline constexpr std::uint64_t kAugmentLimit = 10'000'000;

/// States (s, a_1 .. a_d) with a_1 the oldest queued action. Index =
/// s * |A|^d + queue digits, oldest most significant.
struct AugmentedMDP {
  TabularMDP base;
  int d = 0;
  TabularMDP mdp;

  int index(int s, std::span<const Action> queue) const;
  int base_state(int index) const;
  std::vector<Action> queue(int index) const;
};

/// Executing a in (s, a_1..a_d) runs a_1 on the base MDP and appends a.
/// Throws ResourceError above `limit` states.
AugmentedMDP augment(const TabularMDP& mdp, int d, std::uint64_t limit = kAugmentLimit);

struct Solution {
  std::vector<double> values;
  std::vector<int> policy;
  int iterations = 0;
  double residual = 0.0;
};

inline constexpr double kTieEpsilon = 1e-9;

/// Greedy action per state; actions within kTieEpsilon of the best count as
/// ties and the lowest index wins.
std::vector<int> greedy_policy(const TabularMDP& mdp, std::span<const double> values);
double q_value(const TabularMDP& mdp, std::span<const double> values, int s, int a);

Solution value_iteration(const TabularMDP& mdp, double tol = 1e-10, int max_iterations = 1'000'000);
std::vector<double> policy_evaluation(const TabularMDP& mdp, std::span<const int> policy, double tol = 1e-12,
                                      int max_iterations = 1'000'000);

/// Model-Based Simulation: solve the undelayed MDP, push the state through
/// the queued actions along most-likely transitions and act optimally there.
/// Returns one action per augmented state.
std::vector<int> mbs_policy(const TabularMDP& base, int d);
int mbs_action(const TabularMDP& base, std::span<const int> base_policy, int s, std::span<const Action> queue);

struct OracleComparison {
  int d = 0;
  int augmented_states = 0;
  int policy_mismatches = 0;
  double max_value_gap = 0.0;  // max |V_mbs - V*| over augmented states
  double start_value_optimal = 0.0;
  double start_value_mbs = 0.0;
  std::vector<double> optimal_values;
  std::vector<double> mbs_values;
  std::vector<int> optimal_policy;
  std::vector<int> mbs;
};

/// MBS against value iteration on the augmented MDP. The start state is base
/// state `start` with a queue of no-ops.
OracleComparison compare_mbs(const TabularMDP& base, int d, int start = 0);

nlohmann::json to_json(const OracleComparison& c, bool tables);

}  // namespace drl::tabular
