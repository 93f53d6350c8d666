#pragma once

#include <span>
#include <vector>

#include "drl/agents/agent.hpp"
#include "drl/agents/trajectory.hpp"
#include "drl/nn/adam.hpp"

namespace drl::agents {

/// Per-trajectory V-trace targets, aligned to trainable decisions.
struct BatchTargets {
  std::vector<std::vector<double>> vs;
  std::vector<std::vector<double>> advantages;
};

struct LossReport {
  double total = 0.0;
  double policy = 0.0;
  double value = 0.0;
  double entropy = 0.0;  // mean policy entropy (enters the total with -entropy_weight)
  double model = 0.0;
  double mean_reward = 0.0;  // mean delayed reward r_{t+d} over decisions
  std::size_t decisions = 0;
  std::size_t model_terms = 0;
  predictor::PredictionStats prediction;
  BatchTargets targets;
  std::vector<double> grads;
};

/// Total learner loss and its gradient w.r.t. every parameter:
///
///   policy  -mean(rho_s A_s log pi(a_s | x_s))         (V-trace advantages)
///   value   value_weight * mean(0.5 (V(s_{s+d}) - v_s)^2)
///   entropy -entropy_weight * mean(H(pi(. | x_s)))
///   model   model_weight * mean predictor regression loss
///
/// Decision s is credited with rewards from step s + d on, and the critic
/// reads the true state s_{s+d}. The policy input x_s is rebuilt from the
/// stored (s_t, queue, h_t) exactly as the actor built it. V-trace targets
/// are computed from the current parameters unless `frozen` supplies them;
/// either way they are constants for differentiation.
LossReport learner_loss(const AgentNets& nets, nn::ConstParams params, std::span<const Trajectory> batch,
                        const BatchTargets* frozen = nullptr);

struct LearnerMetrics {
  double total_loss = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double model_loss = 0.0;
  double entropy = 0.0;
  double grad_norm = 0.0;
  double pred_accuracy = 1.0;
  double pred_rmse = 0.0;
  double mean_reward = 0.0;
  std::size_t decisions = 0;
};

/// One Adam step on the total loss. Throws TrainingError on non-finite loss
/// or gradients without touching the parameters.
LearnerMetrics learner_update(const AgentNets& nets, std::vector<double>& params, nn::Adam& optimizer,
                              std::span<const Trajectory> batch);

/// Gradient of -rho_s A_s log pi(a_s | x_s) alone for decision s of one
/// trajectory, with targets from the current parameters.
std::vector<double> decision_policy_gradient(const AgentNets& nets, nn::ConstParams params,
                                             const Trajectory& trajectory, std::size_t decision);

/// Critic estimates V(s_{s+d}) for every trainable decision plus the
/// bootstrap value as the last entry.
std::vector<double> critic_values(const AgentNets& nets, nn::ConstParams params, const Trajectory& trajectory);

/// Number of trainable decisions in a trajectory (T - d).
std::size_t trainable_decisions(const AgentNets& nets, const Trajectory& trajectory);

}  // namespace drl::agents
