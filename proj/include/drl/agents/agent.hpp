#pragma once

#include <optional>
#include <span>
#include <vector>

#include "drl/core/rng.hpp"
#include "drl/core/types.hpp"
#include "drl/nn/adam.hpp"
#include "drl/nn/layers.hpp"
#include "drl/predictor/model.hpp"

namespace drl::agents {

/// (d, p, f) agent plus its learning hyperparameters.
struct AgentConfig {
  int d = 0;  // action delay, agent steps
  int p = 0;  // predictor unroll steps, 0 <= p <= d
  int f = 1;  // frame skip
  double gamma = 0.99;
  double rho_bar = 1.0;
  double c_bar = 1.0;
  double entropy_weight = 0.01;
  double value_weight = 0.5;
  double model_weight = 1.0;
  int unroll = 40;        // trajectory length T
  int model_unroll = 0;   // regression horizon K; 0 picks max(p, 1)
  int hidden = 128;       // policy/value trunk width
  int layers = 2;         // policy/value trunk depth
  predictor::PredictorSizes predictor;
  nn::AdamConfig adam;

  void validate() const;
  int model_horizon() const;
  bool predictive() const { return p > 0; }
};

/// Policy, critic and (for p > 0) predictive model of one agent, laid out in a
/// single flat parameter vector.
class AgentNets {
 public:
  AgentNets(StateSchema schema, int n_actions, AgentConfig config);

  const AgentConfig& config() const { return config_; }
  const StateSchema& schema() const { return schema_; }
  int n_actions() const { return n_actions_; }
  std::size_t n_params() const { return layout_.size(); }
  int policy_input_size() const;

  const nn::Mlp& policy() const { return policy_; }
  const nn::Mlp& value() const { return value_; }
  const predictor::PredictiveModel* model() const { return model_ ? &*model_ : nullptr; }

  std::vector<double> init_params(RngStream& rng) const;

  /// [state features, one-hot of queue[p..d) newest last]. `state_features`
  /// is encode(s_t) for p = 0 and the soft encoding of s_{t,p} otherwise.
  nn::Vec policy_input(const nn::Vec& state_features, std::span<const Action> queue) const;
  /// Critic input: hard encoding of a true state.
  nn::Vec value_input(const MixedState& state) const;

 private:
  StateSchema schema_;
  int n_actions_;
  AgentConfig config_;
  nn::ParamLayout layout_;
  nn::Mlp policy_;
  nn::Mlp value_;
  std::optional<predictor::PredictiveModel> model_;
};

struct ActResult {
  Action action;
  double logprob = 0.0;
  nn::Vec hidden_next;  // core state for the next step (empty when p = 0)
  nn::Vec probs;
  nn::Vec predicted;    // flat s_{t,p} (empty when p = 0)
};

/// Chooses a_t from the observed state, the delay queue (oldest first) and
/// the core state. Samples from the policy, or takes the argmax when
/// `greedy` is set.
ActResult act(const AgentNets& nets, nn::ConstParams params, const MixedState& state,
              std::span<const Action> queue, const nn::Vec& hidden, RngStream& rng, bool greedy = false);

/// Features the policy sees for (s_t, queue, h_t); useful for checking that
/// actor and learner agree.
nn::Vec policy_features(const AgentNets& nets, nn::ConstParams params, const MixedState& state,
                        std::span<const Action> queue, const nn::Vec& hidden);

/// Initial core state (zeros, or empty when the agent has no model).
nn::Vec initial_hidden(const AgentNets& nets);

}  // namespace drl::agents
