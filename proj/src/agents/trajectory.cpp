#include "drl/agents/trajectory.hpp"

#include "drl/core/errors.hpp"

namespace drl::agents {

TrajectoryBuilder::TrajectoryBuilder(int unroll, int d) : unroll_(unroll), d_(d) {
  require(d >= 0 && unroll > d, "trajectory builder: need T > d >= 0");
}

std::optional<Trajectory> TrajectoryBuilder::add(TrajectoryStep step, const MixedState& next_state, bool terminal) {
  buffer_.push_back(std::move(step));
  if (terminal) {
    std::optional<Trajectory> out;
    if (static_cast<int>(buffer_.size()) > d_) out = Trajectory{std::move(buffer_), next_state, true};
    buffer_.clear();
    return out;
  }
  if (static_cast<int>(buffer_.size()) < unroll_) return std::nullopt;
  Trajectory t{buffer_, next_state, false};
  buffer_.erase(buffer_.begin(), buffer_.end() - d_);
  return t;
}

}  // namespace drl::agents
