#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drl/agents/trajectory.hpp"
#include "drl/core/rng.hpp"

namespace drl::harness {

inline constexpr double kGradTolerance = 1e-4;

struct GradSuiteResult {
  std::string name;
  int seeds = 0;
  std::size_t params = 0;  // parameter count of the checked network
  double max_rel_error = 0.0;
  bool pass() const { return max_rel_error < kGradTolerance; }
};

/// Backprop against central finite differences (step 1e-5) for every
/// network in the code base: dense stacks, GRU through time, predictor
/// unrolls (p = 1 and 3), the predictor regression loss and the full learner
/// loss (with and without a predictor). Each suite runs `seeds` random tiny
/// instances and reports the worst relative error.
std::vector<GradSuiteResult> run_gradient_suites(int seeds);

/// Small mixed schema used by the suites and unit tests.
StateSchema tiny_schema();
MixedState random_state(const StateSchema& schema, RngStream& rng);

/// Random trajectory with consistent queue bookkeeping (executed(t) =
/// chosen(t - d)). Core states are left empty.
agents::Trajectory random_trajectory(const StateSchema& schema, int n_actions, int d, int length, RngStream& rng);

}  // namespace drl::harness
