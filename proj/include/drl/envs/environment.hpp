#pragma once

#include <string>

#include "drl/core/rng.hpp"
#include "drl/core/types.hpp"

namespace drl::envs {

struct StepResult {
  MixedState state;
  double reward = 0.0;
  bool terminal = false;
};

/// Single-agent environment. Instances are single-owner; stochastic
/// transitions draw from the RngStream handed over at construction.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual const StateSchema& schema() const = 0;
  virtual int n_actions() const = 0;
  virtual std::string name() const = 0;

  virtual MixedState reset(RngStream& rng) = 0;
  /// Throws ContractViolation when called after a terminal step.
  virtual StepResult step(Action action) = 0;
};

struct TwoPlayerStep {
  MixedState state;  // global view (player A's frame)
  double reward_a = 0.0;
  double reward_b = 0.0;
  bool terminal = false;
};

/// Two-player zero-sum environment; reward_a + reward_b == 0 at every step.
class TwoPlayerEnv {
 public:
  virtual ~TwoPlayerEnv() = default;

  virtual const StateSchema& schema() const = 0;
  virtual int n_actions() const = 0;
  virtual std::string name() const = 0;

  virtual MixedState reset(RngStream& rng) = 0;
  virtual TwoPlayerStep step(Action a, Action b) = 0;
  /// Egocentric observation: player 0 sees the global state, player 1 a
  /// mirrored copy with its own features first.
  virtual MixedState observe(int player) const = 0;
};

}  // namespace drl::envs
