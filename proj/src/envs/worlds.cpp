#include "drl/envs/worlds.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "drl/core/errors.hpp"

namespace drl::envs {

ChainWorld::ChainWorld(int n, int max_steps) : n_(n), max_steps_(max_steps) {
  require(n >= 2, "chain: need at least 2 cells");
  require(max_steps >= 1, "chain: max_steps must be positive");
  schema_ = StateSchema{1, {n}};
}

MixedState ChainWorld::observation(int cell) const {
  return MixedState{{static_cast<double>(cell) / (n_ - 1)}, {{n_, cell}}};
}

int ChainWorld::next_cell(int n, int cell, Action action) {
  if (cell == n - 1) return cell;
  if (action == kRight) return cell + 1;
  return std::max(cell - 1, 0);
}

double ChainWorld::reward(int n, int cell, Action action) {
  return (cell != n - 1 && next_cell(n, cell, action) == n - 1) ? 1.0 : 0.0;
}

MixedState ChainWorld::reset(RngStream&) {
  cell_ = 0;
  steps_ = 0;
  done_ = false;
  return observation(cell_);
}

StepResult ChainWorld::step(Action action) {
  require(!done_, "chain: step after terminal");
  require(action.index >= 0 && action.index < 2, "chain: action out of range");
  const double r = reward(n_, cell_, action);
  cell_ = next_cell(n_, cell_, action);
  ++steps_;
  done_ = cell_ == n_ - 1 || steps_ >= max_steps_;
  return {observation(cell_), r, done_};
}

GridWorld::GridWorld(int width, int height, double slip, int max_steps, RngStream rng)
    : width_(width), height_(height), slip_(slip), max_steps_(max_steps), rng_(rng) {
  require(width >= 1 && height >= 1 && width * height >= 2, "gridworld: need at least 2 cells");
  require(slip >= 0.0 && slip <= 1.0, "gridworld: slip must lie in [0, 1]");
  require(max_steps >= 1, "gridworld: max_steps must be positive");
  schema_ = StateSchema{2, {width * height}};
}

MixedState GridWorld::observation(int cell) const {
  const int x = cell % width_;
  const int y = cell / width_;
  return MixedState{{width_ > 1 ? static_cast<double>(x) / (width_ - 1) : 0.0,
                     height_ > 1 ? static_cast<double>(y) / (height_ - 1) : 0.0},
                    {{width_ * height_, cell}}};
}

int GridWorld::move(int width, int height, int cell, Action action) {
  int x = cell % width;
  int y = cell / width;
  switch (action.index) {
    case 1: y = std::min(y + 1, height - 1); break;
    case 2: y = std::max(y - 1, 0); break;
    case 3: x = std::max(x - 1, 0); break;
    case 4: x = std::min(x + 1, width - 1); break;
    default: break;
  }
  return y * width + x;
}

std::vector<std::pair<int, double>> GridWorld::transition(int width, int height, double slip, int cell,
                                                          Action action) {
  const int goal = width * height - 1;
  if (cell == goal) return {{goal, 1.0}};
  std::map<int, double> probs;
  probs[move(width, height, cell, action)] += 1.0 - slip;
  if (slip > 0.0) {
    for (int m = 1; m <= 4; ++m) probs[move(width, height, cell, Action{m})] += slip / 4.0;
  }
  return {probs.begin(), probs.end()};
}

MixedState GridWorld::reset(RngStream&) {
  cell_ = 0;
  steps_ = 0;
  done_ = false;
  return observation(cell_);
}

StepResult GridWorld::step(Action action) {
  require(!done_, "gridworld: step after terminal");
  require(action.index >= 0 && action.index < 5, "gridworld: action out of range");
  Action effective = action;
  if (slip_ > 0.0 && rng_.uniform() < slip_) effective = Action{1 + rng_.uniform_int(4)};
  const int next = move(width_, height_, cell_, effective);
  const double r = next == goal() ? 1.0 : 0.0;
  cell_ = next;
  ++steps_;
  done_ = cell_ == goal() || steps_ >= max_steps_;
  return {observation(cell_), r, done_};
}

namespace {
constexpr double kMinPosition = -1.2;
constexpr double kMaxPosition = 0.6;
constexpr double kMaxSpeed = 0.07;
constexpr double kGoalPosition = 0.5;
}  // namespace

MountainCar::MountainCar(int max_steps) : max_steps_(max_steps) {
  require(max_steps >= 1, "mountaincar: max_steps must be positive");
  schema_ = StateSchema{2, {}};
}

MixedState MountainCar::observation() const { return MixedState{{position_, velocity_ / kMaxSpeed}, {}}; }

MixedState MountainCar::reset(RngStream& rng) {
  position_ = rng.uniform(-0.6, -0.4);
  velocity_ = 0.0;
  steps_ = 0;
  done_ = false;
  return observation();
}

StepResult MountainCar::step(Action action) {
  require(!done_, "mountaincar: step after terminal");
  require(action.index >= 0 && action.index < 3, "mountaincar: action out of range");
  const double force = action.index == 1 ? -1.0 : (action.index == 2 ? 1.0 : 0.0);
  velocity_ += force * 0.001 - 0.0025 * std::cos(3.0 * position_);
  velocity_ = std::clamp(velocity_, -kMaxSpeed, kMaxSpeed);
  position_ = std::clamp(position_ + velocity_, kMinPosition, kMaxPosition);
  if (position_ == kMinPosition && velocity_ < 0.0) velocity_ = 0.0;
  ++steps_;
  done_ = position_ >= kGoalPosition || steps_ >= max_steps_;
  return {observation(), -1.0, done_};
}

}  // namespace drl::envs
