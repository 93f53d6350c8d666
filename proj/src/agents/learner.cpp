#include "drl/agents/learner.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "drl/agents/returns.hpp"
#include "drl/core/errors.hpp"
#include "drl/nn/ops.hpp"

namespace drl::agents {

using nn::Vec;
using predictor::PredictiveModel;

namespace {

// Forward state of one trajectory, kept for the backward pass.
struct Pass {
  std::size_t len = 0;
  std::size_t n = 0;
  std::vector<PredictiveModel::Unroll> unrolls;  // one per step (length 0 when unused)
  std::vector<std::vector<Vec>> feature_probs;   // softmax of s_{t,p} per decision
  std::vector<nn::Mlp::Cache> policy;
  std::vector<Vec> logp;
  std::vector<nn::Mlp::Cache> value;
  std::vector<double> values;
  std::vector<double> target_logp;
  std::vector<double> behavior_logp;
  std::vector<double> rewards;
  double bootstrap = 0.0;
};

std::size_t model_anchor_horizon(const AgentNets& nets, std::size_t t, std::size_t len) {
  if (nets.model() == nullptr) return 0;
  const auto K = static_cast<std::size_t>(nets.config().model_horizon());
  return t + K <= len ? K : 0;
}

const MixedState& state_at(const Trajectory& tr, std::size_t i) {
  return i < tr.steps.size() ? tr.steps[i].state : tr.final_state;
}

void forward(const AgentNets& nets, nn::ConstParams params, const Trajectory& tr, Pass& pass) {
  const auto& cfg = nets.config();
  const auto d = static_cast<std::size_t>(cfg.d);
  const auto p = static_cast<std::size_t>(cfg.p);
  pass.len = tr.size();
  require(pass.len > d, "learner: trajectory of length " + std::to_string(pass.len) +
                            " is too short to train with d = " + std::to_string(d));
  pass.n = pass.len - d;
  const std::size_t n = pass.n;

  if (const auto* model = nets.model()) {
    pass.unrolls.resize(pass.len);
    std::vector<Action> actions;
    for (std::size_t t = 0; t < pass.len; ++t) {
      const std::size_t L = std::max(t < n ? p : 0, model_anchor_horizon(nets, t, pass.len));
      actions.clear();
      for (std::size_t i = 0; i < L; ++i) actions.push_back(tr.steps[t + i].executed);
      model->unroll(params, model->lift_flat(tr.steps[t].state), tr.steps[t].hidden, actions, pass.unrolls[t]);
    }
    pass.feature_probs.resize(n);
  }

  pass.policy.resize(n);
  pass.logp.resize(n);
  pass.value.resize(n);
  pass.values.resize(n);
  pass.target_logp.resize(n);
  pass.behavior_logp.resize(n);
  pass.rewards.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    const auto& step = tr.steps[s];
    Vec feats;
    if (const auto* model = nets.model()) {
      feats = model->soft_encode(pass.unrolls[s].steps[p - 1].next, &pass.feature_probs[s]);
    } else {
      feats = nets.value_input(step.state);
    }
    const Vec& logits = nets.policy().forward(params, nets.policy_input(feats, step.queue), pass.policy[s]);
    pass.logp[s] = nn::log_softmax(logits);
    pass.target_logp[s] = pass.logp[s](step.chosen.index);
    pass.behavior_logp[s] = step.behavior_logprob;
    pass.values[s] = nets.value().forward(params, nets.value_input(tr.steps[s + d].state), pass.value[s])(0);
    pass.rewards[s] = tr.steps[s + d].reward;
  }
  if (tr.terminal) {
    pass.bootstrap = 0.0;
  } else {
    nn::Mlp::Cache scratch;
    pass.bootstrap = nets.value().forward(params, nets.value_input(tr.final_state), scratch)(0);
  }
}

VTraceResult targets_for(const AgentNets& nets, const Pass& pass) {
  const auto& cfg = nets.config();
  return vtrace_targets(pass.behavior_logp, pass.target_logp, pass.values, pass.bootstrap, pass.rewards, cfg.gamma,
                        cfg.rho_bar, cfg.c_bar);
}

// dL/dlogits of  -coef * log pi(a)  -  ent_coef * H(pi).
Vec policy_logit_grad(const Vec& logp, int action, double coef, double ent_coef) {
  const Vec probs = logp.array().exp().matrix();
  Vec g = coef * probs;
  g(action) -= coef;
  if (ent_coef != 0.0) {
    const double H = -(probs.array() * logp.array()).sum();
    g.array() += ent_coef * probs.array() * (logp.array() + H);
  }
  return g;
}

// Routes a gradient on the policy input back into the predictor unroll.
void policy_input_backward(const AgentNets& nets, const Pass& pass, std::size_t s, const Vec& d_input,
                           std::vector<Vec>& d_dists) {
  const auto* model = nets.model();
  if (model == nullptr) return;
  const int E = nets.schema().encoded_size();
  const auto p = static_cast<std::size_t>(nets.config().p);
  Vec d_dist = model->soft_encode_backward(pass.feature_probs[s], d_input.head(E));
  if (d_dists[p - 1].size() == 0) {
    d_dists[p - 1] = std::move(d_dist);
  } else {
    d_dists[p - 1] += d_dist;
  }
}

}  // namespace

std::size_t trainable_decisions(const AgentNets& nets, const Trajectory& trajectory) {
  const auto d = static_cast<std::size_t>(nets.config().d);
  return trajectory.size() > d ? trajectory.size() - d : 0;
}

LossReport learner_loss(const AgentNets& nets, nn::ConstParams params, std::span<const Trajectory> batch,
                        const BatchTargets* frozen) {
  require(params.size() == nets.n_params(), "learner: parameter vector does not match the network layout");
  require(!batch.empty(), "learner: empty batch");
  if (frozen != nullptr) {
    require(frozen->vs.size() == batch.size() && frozen->advantages.size() == batch.size(),
            "learner: frozen targets do not match the batch");
  }
  const auto& cfg = nets.config();
  const auto* model = nets.model();

  std::size_t N = 0, M = 0;
  for (const auto& tr : batch) {
    N += trainable_decisions(nets, tr);
    for (std::size_t t = 0; t < tr.size(); ++t) M += model_anchor_horizon(nets, t, tr.size());
  }
  require(N > 0, "learner: batch has no trainable decisions");
  const double pscale = 1.0 / static_cast<double>(N);
  const double mscale = M > 0 ? 1.0 / static_cast<double>(M) : 0.0;

  LossReport report;
  report.grads.assign(params.size(), 0.0);
  report.decisions = N;
  report.model_terms = M;
  double policy_sum = 0.0, value_sum = 0.0, entropy_sum = 0.0, reward_sum = 0.0;

  Pass pass;
  std::vector<std::vector<Vec>> d_dists;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& tr = batch[b];
    forward(nets, params, tr, pass);
    std::vector<double> vs, adv;
    if (frozen != nullptr) {
      vs = frozen->vs[b];
      adv = frozen->advantages[b];
      require(vs.size() == pass.n && adv.size() == pass.n, "learner: frozen target length mismatch");
    } else {
      auto vt = targets_for(nets, pass);
      vs = std::move(vt.vs);
      adv = std::move(vt.advantages);
    }

    if (model != nullptr) {
      d_dists.assign(pass.len, {});
      for (std::size_t t = 0; t < pass.len; ++t) d_dists[t].assign(pass.unrolls[t].length, Vec());
    }

    for (std::size_t s = 0; s < pass.n; ++s) {
      const int a = tr.steps[s].chosen.index;
      const double H = -(pass.logp[s].array().exp() * pass.logp[s].array()).sum();
      policy_sum += -adv[s] * pass.logp[s](a);
      entropy_sum += H;
      reward_sum += pass.rewards[s];
      const double diff = pass.values[s] - vs[s];
      value_sum += 0.5 * diff * diff;

      const Vec g_logits = policy_logit_grad(pass.logp[s], a, adv[s] * pscale, cfg.entropy_weight * pscale);
      const Vec d_input = nets.policy().backward(params, pass.policy[s], g_logits, report.grads);
      if (model != nullptr) policy_input_backward(nets, pass, s, d_input, d_dists[s]);

      const Vec d_value = Vec::Constant(1, cfg.value_weight * pscale * diff);
      nets.value().backward(params, pass.value[s], d_value, report.grads);
    }

    if (model != nullptr) {
      for (std::size_t t = 0; t < pass.len; ++t) {
        const std::size_t K = model_anchor_horizon(nets, t, pass.len);
        for (std::size_t i = 0; i < K; ++i) {
          Vec d_pred;
          predictor::prediction_loss(*model, pass.unrolls[t].steps[i].next, state_at(tr, t + i + 1), &d_pred,
                                     &report.prediction);
          d_pred *= cfg.model_weight * mscale;
          if (d_dists[t][i].size() == 0) {
            d_dists[t][i] = std::move(d_pred);
          } else {
            d_dists[t][i] += d_pred;
          }
        }
        if (pass.unrolls[t].length > 0) model->unroll_backward(params, pass.unrolls[t], d_dists[t], report.grads);
      }
    }
    report.targets.vs.push_back(std::move(vs));
    report.targets.advantages.push_back(std::move(adv));
  }

  report.policy = policy_sum * pscale;
  report.value = value_sum * pscale;
  report.entropy = entropy_sum * pscale;
  report.mean_reward = reward_sum * pscale;
  report.model = report.prediction.loss * mscale;
  report.total = report.policy + cfg.value_weight * report.value - cfg.entropy_weight * report.entropy +
                 cfg.model_weight * report.model;
  if (!std::isfinite(report.total)) throw TrainingError("learner: non-finite loss");
  return report;
}

LearnerMetrics learner_update(const AgentNets& nets, std::vector<double>& params, nn::Adam& optimizer,
                              std::span<const Trajectory> batch) {
  const auto report = learner_loss(nets, params, batch);
  LearnerMetrics m;
  m.grad_norm = optimizer.step(params, report.grads);
  m.total_loss = report.total;
  m.policy_loss = report.policy;
  m.value_loss = report.value;
  m.model_loss = report.model;
  m.entropy = report.entropy;
  m.pred_accuracy = report.prediction.accuracy();
  m.pred_rmse = report.prediction.rmse();
  m.mean_reward = report.mean_reward;
  m.decisions = report.decisions;
  return m;
}

std::vector<double> decision_policy_gradient(const AgentNets& nets, nn::ConstParams params,
                                             const Trajectory& trajectory, std::size_t decision) {
  Pass pass;
  forward(nets, params, trajectory, pass);
  require(decision < pass.n, "learner: decision index out of range");
  const auto vt = targets_for(nets, pass);
  std::vector<double> grads(params.size(), 0.0);
  const int a = trajectory.steps[decision].chosen.index;
  const Vec g_logits = policy_logit_grad(pass.logp[decision], a, vt.advantages[decision], 0.0);
  const Vec d_input = nets.policy().backward(params, pass.policy[decision], g_logits, grads);
  if (const auto* model = nets.model()) {
    std::vector<Vec> d_dists(pass.unrolls[decision].length);
    policy_input_backward(nets, pass, decision, d_input, d_dists);
    model->unroll_backward(params, pass.unrolls[decision], d_dists, grads);
  }
  return grads;
}

std::vector<double> critic_values(const AgentNets& nets, nn::ConstParams params, const Trajectory& trajectory) {
  Pass pass;
  forward(nets, params, trajectory, pass);
  auto out = pass.values;
  out.push_back(pass.bootstrap);
  return out;
}

}  // namespace drl::agents
