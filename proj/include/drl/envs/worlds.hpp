#pragma once

#include <utility>
#include <vector>

#include "drl/envs/environment.hpp"

namespace drl::envs {

/// Deterministic line of n cells. Actions: 0 = left, 1 = right. Entering the
/// rightmost cell pays 1 and ends the episode (the cell is absorbing).
/// Observation: [cell / (n - 1)] plus the cell index as a categorical slot.
class ChainWorld : public Environment {
 public:
  static constexpr Action kLeft{0};
  static constexpr Action kRight{1};

  ChainWorld(int n, int max_steps);

  const StateSchema& schema() const override { return schema_; }
  int n_actions() const override { return 2; }
  std::string name() const override { return "chain"; }
  MixedState reset(RngStream& rng) override;
  StepResult step(Action action) override;

  int size() const { return n_; }
  int cell() const { return cell_; }
  MixedState observation(int cell) const;

  static int next_cell(int n, int cell, Action action);
  static double reward(int n, int cell, Action action);

 private:
  int n_;
  int max_steps_;
  StateSchema schema_;
  int cell_ = 0;
  int steps_ = 0;
  bool done_ = true;
};

/// width x height grid, start in the bottom-left cell, goal (reward 1,
/// absorbing) in the top-right. Actions: 0 = stay, 1 = up, 2 = down,
/// 3 = left, 4 = right. With probability `slip` the intended action is
/// replaced by a uniformly random move.
class GridWorld : public Environment {
 public:
  GridWorld(int width, int height, double slip, int max_steps, RngStream rng);

  const StateSchema& schema() const override { return schema_; }
  int n_actions() const override { return 5; }
  std::string name() const override { return "gridworld"; }
  MixedState reset(RngStream& rng) override;
  StepResult step(Action action) override;

  int cell() const { return cell_; }
  int goal() const { return width_ * height_ - 1; }
  MixedState observation(int cell) const;

  /// Deterministic effect of a move (walls block).
  static int move(int width, int height, int cell, Action action);
  /// Aggregated next-cell distribution including slip, sorted by cell.
  static std::vector<std::pair<int, double>> transition(int width, int height, double slip, int cell,
                                                        Action action);

 private:
  int width_;
  int height_;
  double slip_;
  int max_steps_;
  RngStream rng_;
  StateSchema schema_;
  int cell_ = 0;
  int steps_ = 0;
  bool done_ = true;
};

/// Classic 1-D mountain car. Actions: 0 = coast, 1 = push left,
/// 2 = push right. Reward -1 per step; the episode ends at the flag
/// (position >= 0.5) or after max_steps. Observation: [position,
/// velocity / 0.07].
class MountainCar : public Environment {
 public:
  explicit MountainCar(int max_steps);

  const StateSchema& schema() const override { return schema_; }
  int n_actions() const override { return 3; }
  std::string name() const override { return "mountaincar"; }
  MixedState reset(RngStream& rng) override;
  StepResult step(Action action) override;

  double position() const { return position_; }
  double velocity() const { return velocity_; }

 private:
  MixedState observation() const;

  int max_steps_;
  StateSchema schema_;
  double position_ = -0.5;
  double velocity_ = 0.0;
  int steps_ = 0;
  bool done_ = true;
};

}  // namespace drl::envs
