#pragma once

#include <optional>
#include <vector>

#include "drl/core/types.hpp"
#include "drl/nn/params.hpp"

namespace drl::agents {

struct TrajectoryStep {
  MixedState state;            // s_t as observed
  std::vector<Action> queue;   // a_{t-d} .. a_{t-1}, oldest first
  Action chosen;               // a_t
  Action executed;             // a_{t-d}
  double reward = 0.0;         // r_t, earned by the executed action
  double behavior_logprob = 0.0;
  nn::Vec hidden;              // core state h_t (empty without a model)
};

/// Fixed-length unroll. `final_state` is the state after the last step; a
/// terminal trajectory bootstraps from zero.
struct Trajectory {
  std::vector<TrajectoryStep> steps;
  MixedState final_state;
  bool terminal = false;

  std::size_t size() const { return steps.size(); }
};

/// Cuts a stream of steps into unrolls of length T. Consecutive unrolls
/// overlap by d steps: the last d decisions of one unroll have not been
/// executed yet, so they are trained as the first decisions of the next.
class TrajectoryBuilder {
 public:
  TrajectoryBuilder(int unroll, int d);

  /// Records one step and the state that followed it. Returns a completed
  /// unroll when the buffer reaches T steps or the episode ended (episode
  /// tails with no trainable decision are dropped).
  std::optional<Trajectory> add(TrajectoryStep step, const MixedState& next_state, bool terminal);
  void clear() { buffer_.clear(); }

 private:
  int unroll_;
  int d_;
  std::vector<TrajectoryStep> buffer_;
};

}  // namespace drl::agents
