#include "drl/tabular/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "drl/core/errors.hpp"
#include "drl/envs/worlds.hpp"

namespace drl::tabular {

TabularMDP::TabularMDP(int n_states_, int n_actions_, double gamma_)
    : n_states(n_states_), n_actions(n_actions_), gamma(gamma_) {
  require(n_states > 0 && n_actions > 0, "tabular: empty MDP");
  transitions.resize(static_cast<std::size_t>(n_states) * n_actions);
  rewards.assign(transitions.size(), 0.0);
}

void TabularMDP::set(int s, int a, std::vector<Transition> next, double reward) {
  require(s >= 0 && s < n_states && a >= 0 && a < n_actions, "tabular: (s, a) out of range");
  transitions[sa(s, a)] = std::move(next);
  rewards[sa(s, a)] = reward;
}

void TabularMDP::validate() const {
  require(gamma >= 0.0 && gamma < 1.0, "tabular: gamma must lie in [0, 1)");
  require(transitions.size() == static_cast<std::size_t>(n_states) * n_actions && rewards.size() == transitions.size(),
          "tabular: table sizes do not match n_states * n_actions");
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      double total = 0.0;
      for (const auto& t : next(s, a)) {
        require(t.next >= 0 && t.next < n_states, "tabular: successor out of range");
        require(t.prob >= 0.0, "tabular: negative probability");
        total += t.prob;
      }
      require(std::abs(total - 1.0) <= 1e-12,
              "tabular: T[" + std::to_string(s) + "][" + std::to_string(a) + "] does not sum to 1");
      require(std::isfinite(reward(s, a)), "tabular: non-finite reward");
    }
  }
}

bool TabularMDP::deterministic() const {
  return std::all_of(transitions.begin(), transitions.end(), [](const auto& ts) {
    return std::count_if(ts.begin(), ts.end(), [](const Transition& t) { return t.prob > 0.0; }) == 1;
  });
}

int TabularMDP::mode(int s, int a) const {
  int best = -1;
  double best_p = -1.0;
  for (const auto& t : next(s, a)) {
    if (t.prob > best_p || (t.prob == best_p && t.next < best)) {
      best = t.next;
      best_p = t.prob;
    }
  }
  return best;
}

TabularMDP chain_mdp(int n, double gamma) {
  require(n >= 2, "chain: need at least 2 cells");
  TabularMDP m(n, 2, gamma);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < 2; ++a) {
      m.set(s, a, {{envs::ChainWorld::next_cell(n, s, Action{a}), 1.0}}, envs::ChainWorld::reward(n, s, Action{a}));
    }
  }
  m.validate();
  return m;
}

TabularMDP gridworld_mdp(int width, int height, double slip, double gamma) {
  require(width >= 1 && height >= 1 && width * height >= 2, "gridworld: need at least 2 cells");
  const int goal = width * height - 1;
  TabularMDP m(width * height, 5, gamma);
  for (int s = 0; s < m.n_states; ++s) {
    for (int a = 0; a < 5; ++a) {
      std::vector<Transition> next;
      double r = 0.0;
      for (const auto& [cell, p] : envs::GridWorld::transition(width, height, slip, s, Action{a})) {
        next.push_back({cell, p});
        if (s != goal && cell == goal) r += p;
      }
      m.set(s, a, std::move(next), r);
    }
  }
  m.validate();
  return m;
}

std::uint64_t augmented_state_count(std::uint64_t n_states, std::uint64_t n_actions, int d) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t count = n_states;
  for (int i = 0; i < d; ++i) {
    if (n_actions != 0 && count > kMax / n_actions) return kMax;
    count *= n_actions;
  }
  return count;
}

int AugmentedMDP::index(int s, std::span<const Action> queue) const {
  require(static_cast<int>(queue.size()) == d, "augmented: queue length must equal d");
  require(s >= 0 && s < base.n_states, "augmented: base state out of range");
  int idx = s;
  for (const auto& a : queue) {
    require(a.index >= 0 && a.index < base.n_actions, "augmented: queued action out of range");
    idx = idx * base.n_actions + a.index;
  }
  return idx;
}

int AugmentedMDP::base_state(int index) const {
  for (int i = 0; i < d; ++i) index /= base.n_actions;
  return index;
}

std::vector<Action> AugmentedMDP::queue(int index) const {
  std::vector<Action> q(static_cast<std::size_t>(d));
  for (int i = d - 1; i >= 0; --i) {
    q[static_cast<std::size_t>(i)] = Action{index % base.n_actions};
    index /= base.n_actions;
  }
  return q;
}

AugmentedMDP augment(const TabularMDP& mdp, int d, std::uint64_t limit) {
  require(d >= 0, "augment: negative delay");
  mdp.validate();
  const auto count = augmented_state_count(static_cast<std::uint64_t>(mdp.n_states),
                                           static_cast<std::uint64_t>(mdp.n_actions), d);
  if (count > limit) {
    throw ResourceError("augment: " + std::to_string(mdp.n_states) + " states x " + std::to_string(mdp.n_actions) +
                        "^" + std::to_string(d) + " exceeds the limit of " + std::to_string(limit) +
                        " augmented states");
  }
  AugmentedMDP out;
  out.base = mdp;
  out.d = d;
  if (d == 0) {
    out.mdp = mdp;
    return out;
  }
  const int n = static_cast<int>(count);
  const int A = mdp.n_actions;
  const int queue_count = n / mdp.n_states;  // |A|^d
  const int tail = queue_count / A;          // |A|^(d-1)
  out.mdp = TabularMDP(n, A, mdp.gamma);
  for (int idx = 0; idx < n; ++idx) {
    const int s = idx / queue_count;
    const int digits = idx % queue_count;
    const int oldest = digits / tail;
    const int rest = digits % tail;
    for (int a = 0; a < A; ++a) {
      std::vector<Transition> next;
      for (const auto& t : mdp.next(s, oldest)) next.push_back({t.next * queue_count + rest * A + a, t.prob});
      out.mdp.set(idx, a, std::move(next), mdp.reward(s, oldest));
    }
  }
  return out;
}

double q_value(const TabularMDP& mdp, std::span<const double> values, int s, int a) {
  double q = mdp.reward(s, a);
  for (const auto& t : mdp.next(s, a)) q += mdp.gamma * t.prob * values[static_cast<std::size_t>(t.next)];
  return q;
}

std::vector<int> greedy_policy(const TabularMDP& mdp, std::span<const double> values) {
  std::vector<int> policy(static_cast<std::size_t>(mdp.n_states), 0);
  for (int s = 0; s < mdp.n_states; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < mdp.n_actions; ++a) best = std::max(best, q_value(mdp, values, s, a));
    for (int a = 0; a < mdp.n_actions; ++a) {
      if (q_value(mdp, values, s, a) >= best - kTieEpsilon) {
        policy[static_cast<std::size_t>(s)] = a;
        break;
      }
    }
  }
  return policy;
}

Solution value_iteration(const TabularMDP& mdp, double tol, int max_iterations) {
  mdp.validate();
  require(tol > 0.0, "value_iteration: tolerance must be positive");
  Solution sol;
  sol.values.assign(static_cast<std::size_t>(mdp.n_states), 0.0);
  std::vector<double> next(sol.values.size());
  for (int it = 1; it <= max_iterations; ++it) {
    double residual = 0.0;
    for (int s = 0; s < mdp.n_states; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < mdp.n_actions; ++a) best = std::max(best, q_value(mdp, sol.values, s, a));
      next[static_cast<std::size_t>(s)] = best;
      residual = std::max(residual, std::abs(best - sol.values[static_cast<std::size_t>(s)]));
    }
    sol.values.swap(next);
    sol.iterations = it;
    sol.residual = residual;
    if (residual < tol) break;
  }
  sol.policy = greedy_policy(mdp, sol.values);
  return sol;
}

std::vector<double> policy_evaluation(const TabularMDP& mdp, std::span<const int> policy, double tol,
                                      int max_iterations) {
  mdp.validate();
  require(static_cast<int>(policy.size()) == mdp.n_states, "policy_evaluation: policy size mismatch");
  std::vector<double> v(static_cast<std::size_t>(mdp.n_states), 0.0), next(v.size());
  for (int it = 0; it < max_iterations; ++it) {
    double residual = 0.0;
    for (int s = 0; s < mdp.n_states; ++s) {
      const double q = q_value(mdp, v, s, policy[static_cast<std::size_t>(s)]);
      residual = std::max(residual, std::abs(q - v[static_cast<std::size_t>(s)]));
      next[static_cast<std::size_t>(s)] = q;
    }
    v.swap(next);
    if (residual < tol) break;
  }
  return v;
}

int mbs_action(const TabularMDP& base, std::span<const int> base_policy, int s, std::span<const Action> queue) {
  for (const auto& a : queue) s = base.mode(s, a.index);
  return base_policy[static_cast<std::size_t>(s)];
}

std::vector<int> mbs_policy(const TabularMDP& base, int d) {
  const auto undelayed = value_iteration(base);
  const auto aug = augment(base, d);
  std::vector<int> policy(static_cast<std::size_t>(aug.mdp.n_states));
  for (int idx = 0; idx < aug.mdp.n_states; ++idx) {
    policy[static_cast<std::size_t>(idx)] = mbs_action(base, undelayed.policy, aug.base_state(idx), aug.queue(idx));
  }
  return policy;
}

OracleComparison compare_mbs(const TabularMDP& base, int d, int start) {
  const auto aug = augment(base, d);
  const auto opt = value_iteration(aug.mdp);
  OracleComparison c;
  c.d = d;
  c.augmented_states = aug.mdp.n_states;
  c.mbs = mbs_policy(base, d);
  c.optimal_policy = opt.policy;
  c.optimal_values = policy_evaluation(aug.mdp, opt.policy);
  c.mbs_values = policy_evaluation(aug.mdp, c.mbs);
  for (std::size_t i = 0; i < c.mbs.size(); ++i) {
    if (c.mbs[i] != c.optimal_policy[i]) ++c.policy_mismatches;
    c.max_value_gap = std::max(c.max_value_gap, std::abs(c.mbs_values[i] - c.optimal_values[i]));
  }
  const std::vector<Action> noops(static_cast<std::size_t>(d), Action{0});
  const auto s0 = static_cast<std::size_t>(aug.index(start, noops));
  c.start_value_optimal = c.optimal_values[s0];
  c.start_value_mbs = c.mbs_values[s0];
  return c;
}

nlohmann::json to_json(const OracleComparison& c, bool tables) {
  nlohmann::json j = {
      {"d", c.d},
      {"augmented_states", c.augmented_states},
      {"policy_mismatches", c.policy_mismatches},
      {"max_value_gap", c.max_value_gap},
      {"start_value_optimal", c.start_value_optimal},
      {"start_value_mbs", c.start_value_mbs},
  };
  if (tables) {
    j["optimal_policy"] = c.optimal_policy;
    j["mbs_policy"] = c.mbs;
    j["optimal_values"] = c.optimal_values;
    j["mbs_values"] = c.mbs_values;
  }
  return j;
}

}  // namespace drl::tabular
