#include "drl/envs/delay.hpp"

#include "drl/core/errors.hpp"

namespace drl::envs {

DelayQueue::DelayQueue(int d) : d_(d) {
  require(d >= 0, "delay queue: negative delay");
  clear();
}

void DelayQueue::clear() { buffer_.assign(static_cast<std::size_t>(d_), kNoop); }

Action DelayQueue::push(Action chosen) {
  if (d_ == 0) return chosen;
  buffer_.push_back(chosen);
  const Action out = buffer_.front();
  buffer_.pop_front();
  return out;
}

Action DelayQueue::front() const {
  require(d_ > 0, "delay queue: front() on a zero-length queue");
  return buffer_.front();
}

DelayedEnv::DelayedEnv(std::unique_ptr<Environment> inner, int d, int frame_skip)
    : inner_(std::move(inner)), queue_(d), frame_skip_(frame_skip) {
  require(inner_ != nullptr, "delayed env: null inner environment");
  require(frame_skip_ >= 1, "delayed env: frame skip must be >= 1");
}

MixedState DelayedEnv::reset(RngStream& rng) {
  queue_.clear();
  terminal_ = false;
  return inner_->reset(rng);
}

DelayedStep DelayedEnv::step(Action chosen) {
  require(!terminal_, "delayed env: step after terminal");
  require(chosen.index >= 0 && chosen.index < inner_->n_actions(), "delayed env: action out of range");
  DelayedStep out;
  out.executed = queue_.push(chosen);
  for (int i = 0; i < frame_skip_; ++i) {
    auto r = inner_->step(out.executed);
    out.reward += r.reward;
    out.state = std::move(r.state);
    if (r.terminal) {
      out.terminal = true;
      break;
    }
  }
  terminal_ = out.terminal;
  out.queue = queue_.snapshot();
  return out;
}

DelayedTwoPlayerEnv::DelayedTwoPlayerEnv(std::unique_ptr<TwoPlayerEnv> inner, int d_a, int d_b,
                                         int frame_skip)
    : inner_(std::move(inner)), queue_a_(d_a), queue_b_(d_b), frame_skip_(frame_skip) {
  require(inner_ != nullptr, "delayed env: null inner environment");
  require(frame_skip_ >= 1, "delayed env: frame skip must be >= 1");
}

MixedState DelayedTwoPlayerEnv::reset(RngStream& rng) {
  queue_a_.clear();
  queue_b_.clear();
  terminal_ = false;
  return inner_->reset(rng);
}

DelayedTwoPlayerStep DelayedTwoPlayerEnv::step(Action chosen_a, Action chosen_b) {
  require(!terminal_, "delayed env: step after terminal");
  DelayedTwoPlayerStep out;
  out.executed_a = queue_a_.push(chosen_a);
  out.executed_b = queue_b_.push(chosen_b);
  for (int i = 0; i < frame_skip_; ++i) {
    auto r = inner_->step(out.executed_a, out.executed_b);
    out.reward_a += r.reward_a;
    out.reward_b += r.reward_b;
    out.state = std::move(r.state);
    if (r.terminal) {
      out.terminal = true;
      break;
    }
  }
  terminal_ = out.terminal;
  return out;
}

std::vector<Action> DelayedTwoPlayerEnv::queue(int player) const {
  require(player == 0 || player == 1, "delayed env: player must be 0 or 1");
  return player == 0 ? queue_a_.snapshot() : queue_b_.snapshot();
}

ReactionTime reaction_time_ms(int d, int frame_skip, double hz) {
  require(d >= 0, "reaction time: negative delay");
  require(frame_skip >= 1, "reaction time: frame skip must be >= 1");
  require(hz > 0.0, "reaction time: frame rate must be positive");
  ReactionTime rt;
  rt.frames = d * frame_skip;
  rt.milliseconds = rt.frames * 1000.0 / hz;
  rt.average_milliseconds = (rt.frames + (frame_skip - 1) / 2.0) * 1000.0 / hz;
  return rt;
}

}  // namespace drl::envs
