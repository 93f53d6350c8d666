#include "drl/agents/agent.hpp"

#include <algorithm>
#include <string>

#include "drl/core/errors.hpp"
#include "drl/nn/ops.hpp"

namespace drl::agents {

using nn::Vec;

void AgentConfig::validate() const {
  require(d >= 0, "agent.d must be >= 0");
  require(p >= 0 && p <= d, "agent.p must satisfy 0 <= p <= d (p = " + std::to_string(p) +
                                ", d = " + std::to_string(d) + ")");
  require(f >= 1, "agent.f must be >= 1");
  require(gamma >= 0.0 && gamma < 1.0, "agent.gamma must lie in [0, 1)");
  require(c_bar > 0.0 && rho_bar >= c_bar, "agent: V-trace clips must satisfy rho_bar >= c_bar > 0");
  require(unroll > d, "agent.unroll must exceed the delay (T > d)");
  require(model_unroll >= 0, "agent.model_unroll must be >= 0");
  if (p > 0) require(model_horizon() <= d, "agent.model_unroll must not exceed d");
  require(hidden >= 1 && layers >= 1, "agent: trunk sizes must be positive");
  require(entropy_weight >= 0.0 && value_weight >= 0.0 && model_weight >= 0.0,
          "agent: loss weights must be non-negative");
}

int AgentConfig::model_horizon() const { return model_unroll > 0 ? model_unroll : std::max(p, 1); }

namespace {

int policy_in(const StateSchema& schema, int n_actions, const AgentConfig& c) {
  return schema.encoded_size() + (c.d - c.p) * n_actions;
}

std::vector<int> trunk(const AgentConfig& c) { return std::vector<int>(static_cast<std::size_t>(c.layers), c.hidden); }

}  // namespace

AgentNets::AgentNets(StateSchema schema, int n_actions, AgentConfig config)
    : schema_((schema.validate(), std::move(schema))),
      n_actions_(n_actions),
      config_((config.validate(), config)),
      policy_(layout_, policy_in(schema_, n_actions, config_), trunk(config_), n_actions, nn::Activation::tanh,
              nn::Activation::identity),
      value_(layout_, schema_.encoded_size(), trunk(config_), 1, nn::Activation::tanh, nn::Activation::identity) {
  require(n_actions >= 1, "agent: need at least one action");
  if (config_.predictive()) model_.emplace(layout_, schema_, n_actions_, config_.predictor);
}

int AgentNets::policy_input_size() const { return policy_in(schema_, n_actions_, config_); }

std::vector<double> AgentNets::init_params(RngStream& rng) const {
  std::vector<double> params(n_params(), 0.0);
  policy_.init(params, rng);
  value_.init(params, rng);
  if (model_) model_->init(params, rng);
  return params;
}

Vec AgentNets::policy_input(const Vec& state_features, std::span<const Action> queue) const {
  require(static_cast<int>(queue.size()) == config_.d,
          "agent: queue length " + std::to_string(queue.size()) + " != d = " + std::to_string(config_.d));
  const int E = schema_.encoded_size();
  require(state_features.size() == E, "agent: state feature size mismatch");
  Vec x = Vec::Zero(policy_input_size());
  x.head(E) = state_features;
  for (int i = config_.p; i < config_.d; ++i) {
    const int a = queue[static_cast<std::size_t>(i)].index;
    require(a >= 0 && a < n_actions_, "agent: queued action out of range");
    x(E + (i - config_.p) * n_actions_ + a) = 1.0;
  }
  return x;
}

Vec AgentNets::value_input(const MixedState& state) const {
  const auto e = encode(state, schema_);
  return Eigen::Map<const Vec>(e.data(), static_cast<Eigen::Index>(e.size()));
}

Vec initial_hidden(const AgentNets& nets) {
  return nets.model() != nullptr ? nets.model()->initial_hidden() : Vec();
}

namespace {

struct Features {
  Vec input;
  Vec hidden_next;
  Vec predicted;
};

Features features(const AgentNets& nets, nn::ConstParams params, const MixedState& state,
                  std::span<const Action> queue, const Vec& hidden) {
  const auto& cfg = nets.config();
  require(static_cast<int>(queue.size()) == cfg.d, "act: queue length does not match the agent's delay");
  Features out;
  if (const auto* model = nets.model()) {
    require(hidden.size() == model->hidden_size(), "act: core state size mismatch");
    predictor::PredictiveModel::Unroll u;
    model->unroll(params, model->lift_flat(state), hidden, queue.first(static_cast<std::size_t>(cfg.p)), u);
    out.predicted = u.final_dist();
    out.hidden_next = u.steps[0].core.h_next;
    out.input = nets.policy_input(model->soft_encode(out.predicted), queue);
  } else {
    out.input = nets.policy_input(nets.value_input(state), queue);
  }
  return out;
}

}  // namespace

Vec policy_features(const AgentNets& nets, nn::ConstParams params, const MixedState& state,
                    std::span<const Action> queue, const Vec& hidden) {
  return features(nets, params, state, queue, hidden).input;
}

ActResult act(const AgentNets& nets, nn::ConstParams params, const MixedState& state, std::span<const Action> queue,
              const Vec& hidden, RngStream& rng, bool greedy) {
  auto f = features(nets, params, state, queue, hidden);
  nn::Mlp::Cache cache;
  const Vec& logits = nets.policy().forward(params, f.input, cache);
  const Vec logp = nn::log_softmax(logits);
  ActResult out;
  out.probs = logp.array().exp().matrix();
  const int a = greedy ? argmax({logits.data(), static_cast<std::size_t>(logits.size())})
                       : rng.categorical({out.probs.data(), static_cast<std::size_t>(out.probs.size())});
  out.action = Action{a};
  out.logprob = logp(a);
  out.hidden_next = std::move(f.hidden_next);
  out.predicted = std::move(f.predicted);
  return out;
}

}  // namespace drl::agents
