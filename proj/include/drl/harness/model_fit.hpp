#pragma once

#include <cstdint>

#include "drl/predictor/model.hpp"

namespace drl::harness {

struct ChainFitConfig {
  int n = 5;                 // chain length
  int K = 3;                 // regression horizon
  int sequence_length = 10;  // states per training sequence
  int batch = 8;
  int max_iterations = 20000;
  int check_every = 250;
  double lr = 3e-3;
  double final_lr = 1e-4;
  predictor::PredictorSizes sizes{32, 32};
  std::uint64_t seed = 1;
};

struct ChainFitReport {
  int iterations = 0;
  double final_loss = 0.0;
  double one_step_accuracy = 0.0;  // categorical argmax accuracy over all (s, a, history)
  double one_step_rmse = 0.0;
  int rollout_cases = 0;  // (3,3) rollouts checked
  int rollout_exact = 0;  // decode_hard matched the true s_{t+3}
  double rollout_max_continuous_error = 0.0;

  bool accuracy_ok() const { return one_step_accuracy == 1.0; }
  bool rmse_ok() const { return one_step_rmse < 1e-3; }
  bool rollout_ok() const { return rollout_cases > 0 && rollout_exact == rollout_cases; }
};

/// Continuous components count as reproduced within this distance.
inline constexpr double kRolloutContinuousTolerance = 1e-3;

/// Trains a predictive model on random-action sequences of the deterministic
/// chain and measures it exhaustively: every (cell, action) one step ahead
/// and every (cell, 3 queued actions) rollout, each from a zero core state
/// and from core states reached along random histories.
ChainFitReport fit_chain_predictor(const ChainFitConfig& cfg);

/// Measurement part alone.
ChainFitReport measure_chain_predictor(const predictor::PredictiveModel& model, nn::ConstParams params, int n,
                                       std::uint64_t seed);

}  // namespace drl::harness
