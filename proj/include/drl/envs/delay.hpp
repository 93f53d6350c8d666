#pragma once

#include <deque>
#include <memory>
#include <vector>

#include "drl/envs/environment.hpp"

namespace drl::envs {

/// Fixed-length FIFO of pending actions. Chosen actions enter at the back;
/// the action leaving the front is the one that executes.
class DelayQueue {
 public:
  explicit DelayQueue(int d);

  int delay() const { return d_; }
  /// Refills the queue with d no-ops.
  void clear();
  /// Pushes `chosen` and returns the action that executes now. With d = 0
  /// this is `chosen` itself.
  Action push(Action chosen);
  /// Oldest first: a_{t-d}, ..., a_{t-1}.
  std::vector<Action> snapshot() const { return {buffer_.begin(), buffer_.end()}; }
  Action front() const;

 private:
  int d_;
  std::deque<Action> buffer_;
};

struct DelayedStep {
  MixedState state;
  std::vector<Action> queue;  // snapshot after `chosen` entered
  double reward = 0.0;
  bool terminal = false;
  Action executed;
};

/// Constant-delay wrapper with frame skip. The agent observes the current
/// state together with the queue contents (the augmented observation); the
/// executed action is repeated for `frame_skip` inner frames and the rewards
/// of those frames are summed.
class DelayedEnv {
 public:
  DelayedEnv(std::unique_ptr<Environment> inner, int d, int frame_skip = 1);

  const StateSchema& schema() const { return inner_->schema(); }
  int n_actions() const { return inner_->n_actions(); }
  int delay() const { return queue_.delay(); }
  int frame_skip() const { return frame_skip_; }
  Environment& inner() { return *inner_; }

  MixedState reset(RngStream& rng);
  DelayedStep step(Action chosen);
  std::vector<Action> queue() const { return queue_.snapshot(); }
  bool terminal() const { return terminal_; }

 private:
  std::unique_ptr<Environment> inner_;
  DelayQueue queue_;
  int frame_skip_;
  bool terminal_ = true;
};

struct DelayedTwoPlayerStep {
  MixedState state;  // global view
  double reward_a = 0.0;
  double reward_b = 0.0;
  bool terminal = false;
  Action executed_a;
  Action executed_b;
};

/// Two-player variant: each player owns an independent queue and delay.
class DelayedTwoPlayerEnv {
 public:
  DelayedTwoPlayerEnv(std::unique_ptr<TwoPlayerEnv> inner, int d_a, int d_b, int frame_skip = 1);

  const StateSchema& schema() const { return inner_->schema(); }
  int n_actions() const { return inner_->n_actions(); }
  TwoPlayerEnv& inner() { return *inner_; }

  MixedState reset(RngStream& rng);
  DelayedTwoPlayerStep step(Action chosen_a, Action chosen_b);
  std::vector<Action> queue(int player) const;
  MixedState observe(int player) const { return inner_->observe(player); }
  bool terminal() const { return terminal_; }

 private:
  std::unique_ptr<TwoPlayerEnv> inner_;
  DelayQueue queue_a_;
  DelayQueue queue_b_;
  int frame_skip_;
  bool terminal_ = true;
};

struct ReactionTime {
  int frames = 0;
  double milliseconds = 0.0;
  /// Adds the (f - 1) / 2 frames a frame skip costs on average.
  double average_milliseconds = 0.0;
};

/// Reaction time of a (d, ., f) agent at `hz` frames per second.
ReactionTime reaction_time_ms(int d, int frame_skip, double hz = 60.0);

}  // namespace drl::envs
