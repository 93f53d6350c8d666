#include "drl/predictor/model.hpp"

#include <cmath>
#include <string>

#include "drl/core/errors.hpp"
#include "drl/nn/ops.hpp"

namespace drl::predictor {

using nn::Vec;

namespace {

int head_input_size(const StateSchema& schema, int n_actions, int hidden) {
  return schema.encoded_size() + n_actions + hidden;
}

}  // namespace

PredictiveModel::PredictiveModel(nn::ParamLayout& layout, StateSchema schema, int n_actions, PredictorSizes sizes)
    : schema_((schema.validate(), std::move(schema))),
      n_actions_(n_actions),
      core_(layout, schema_.encoded_size(), sizes.gru_hidden),
      delta_(layout, head_input_size(schema_, n_actions, sizes.gru_hidden), {sizes.head_hidden},
             schema_.dist_size(), nn::Activation::tanh, nn::Activation::identity),
      fresh_(layout, head_input_size(schema_, n_actions, sizes.gru_hidden), {sizes.head_hidden},
             schema_.dist_size(), nn::Activation::tanh, nn::Activation::identity),
      forget_(layout, head_input_size(schema_, n_actions, sizes.gru_hidden), {sizes.head_hidden},
              schema_.dist_size(), nn::Activation::tanh, nn::Activation::sigmoid) {
  require(n_actions >= 1, "predictor: need at least one action");
}

void PredictiveModel::init(nn::MutParams params, RngStream& rng) const {
  core_.init(params, rng);
  delta_.init(params, rng);
  fresh_.init(params, rng);
  forget_.init(params, rng);
}

Vec PredictiveModel::lift_flat(const MixedState& s) const {
  const auto flat = flatten(lift(s, schema_));
  return Eigen::Map<const Vec>(flat.data(), static_cast<Eigen::Index>(flat.size()));
}

Vec PredictiveModel::soft_encode(const Vec& dist, std::vector<Vec>* probs) const {
  require(dist.size() == schema_.dist_size(), "predictor: distribution size mismatch");
  Vec out(dist.size());
  const int nc = schema_.n_continuous;
  out.head(nc) = dist.head(nc);
  if (probs != nullptr) probs->resize(schema_.categorical_cards.size());
  int pos = nc;
  for (std::size_t k = 0; k < schema_.categorical_cards.size(); ++k) {
    const int card = schema_.categorical_cards[k];
    Vec p = nn::softmax(dist.segment(pos, card));
    out.segment(pos, card) = p;
    if (probs != nullptr) (*probs)[k] = std::move(p);
    pos += card;
  }
  return out;
}

Vec PredictiveModel::soft_encode_backward(const std::vector<Vec>& probs, const Vec& d_encoded) const {
  Vec out(d_encoded.size());
  const int nc = schema_.n_continuous;
  out.head(nc) = d_encoded.head(nc);
  int pos = nc;
  for (std::size_t k = 0; k < schema_.categorical_cards.size(); ++k) {
    const int card = schema_.categorical_cards[k];
    out.segment(pos, card) = nn::softmax_backward(probs[k], d_encoded.segment(pos, card));
    pos += card;
  }
  return out;
}

void PredictiveModel::step_forward(nn::ConstParams params, const Vec& dist, Action action, const Vec& h,
                                   StepCache& c) const {
  require(action.index >= 0 && action.index < n_actions_, "predictor: action out of range");
  c.dist = dist;
  c.action = action;
  c.encoded = soft_encode(dist, &c.probs);
  core_.forward(params, c.encoded, h, c.core);

  const int E = static_cast<int>(c.encoded.size());
  c.head_input.setZero(E + n_actions_ + core_.hidden());
  c.head_input.head(E) = c.encoded;
  c.head_input(E + action.index) = 1.0;
  c.head_input.tail(core_.hidden()) = c.core.h_next;

  const Vec& d = delta_.forward(params, c.head_input, c.delta);
  const Vec& n = fresh_.forward(params, c.head_input, c.fresh);
  const Vec& f = forget_.forward(params, c.head_input, c.forget);
  c.next = f.cwiseProduct(dist + d) + (Vec::Ones(f.size()) - f).cwiseProduct(n);
}

void PredictiveModel::step_backward(nn::ConstParams params, const StepCache& c, const Vec& d_next,
                                    const Vec& d_hidden_next, nn::MutParams grads, Vec& d_dist,
                                    Vec& d_hidden) const {
  const Vec& d = c.delta.output();
  const Vec& n = c.fresh.output();
  const Vec& f = c.forget.output();

  const Vec d_f = d_next.cwiseProduct(c.dist + d - n);
  const Vec d_d = d_next.cwiseProduct(f);
  const Vec d_n = d_next.cwiseProduct(Vec::Ones(f.size()) - f);
  d_dist = d_d;

  Vec d_in = delta_.backward(params, c.delta, d_d, grads);
  d_in += fresh_.backward(params, c.fresh, d_n, grads);
  d_in += forget_.backward(params, c.forget, d_f, grads);

  const int E = static_cast<int>(c.encoded.size());
  const int H = core_.hidden();
  Vec d_core_out = d_in.tail(H);
  if (d_hidden_next.size() > 0) d_core_out += d_hidden_next;
  Vec d_core_in;
  core_.backward(params, c.core, d_core_out, grads, d_core_in, d_hidden);
  Vec d_encoded = d_in.head(E) + d_core_in;
  d_dist += soft_encode_backward(c.probs, d_encoded);
}

void PredictiveModel::unroll(nn::ConstParams params, const Vec& dist0, const Vec& h0,
                             std::span<const Action> actions, Unroll& out) const {
  out.dist0 = dist0;
  out.h0 = h0;
  out.length = actions.size();
  if (out.steps.size() < actions.size()) out.steps.resize(actions.size());
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const Vec& dist = i == 0 ? dist0 : out.steps[i - 1].next;
    const Vec& h = i == 0 ? h0 : out.steps[i - 1].core.h_next;
    step_forward(params, dist, actions[i], h, out.steps[i]);
    if (!out.steps[i].next.allFinite()) {
      throw TrainingError("predictor: non-finite prediction at unroll step " + std::to_string(i + 1));
    }
  }
}

void PredictiveModel::unroll_backward(nn::ConstParams params, const Unroll& u, std::span<const Vec> d_dists,
                                      nn::MutParams grads) const {
  require(d_dists.size() == u.length, "predictor: one upstream gradient per unroll step required");
  Vec carry_dist = Vec::Zero(dist_size());
  Vec carry_h;  // empty: no gradient flows into the final hidden state
  Vec d_dist, d_h;
  for (std::size_t i = u.length; i-- > 0;) {
    Vec d_next = carry_dist;
    if (d_dists[i].size() > 0) d_next += d_dists[i];
    step_backward(params, u.steps[i], d_next, carry_h, grads, d_dist, d_h);
    carry_dist.swap(d_dist);
    carry_h.swap(d_h);
  }
}

Vec PredictiveModel::advance_hidden(nn::ConstParams params, const MixedState& s, const Vec& h) const {
  nn::GruCell::Cache cache;
  core_.forward(params, soft_encode(lift_flat(s)), h, cache);
  return cache.h_next;
}

PredictorState predict_one(const PredictiveModel& model, nn::ConstParams params, const PredictorState& state,
                           Action action) {
  check_conforms(state.dist, model.schema());
  const auto flat = flatten(state.dist);
  PredictiveModel::StepCache cache;
  model.step_forward(params, Eigen::Map<const Vec>(flat.data(), static_cast<Eigen::Index>(flat.size())), action,
                     state.hidden, cache);
  if (!cache.next.allFinite()) throw TrainingError("predictor: non-finite prediction");
  return {unflatten({cache.next.data(), static_cast<std::size_t>(cache.next.size())}, model.schema()),
          cache.core.h_next};
}

RolloutResult rollout(const PredictiveModel& model, nn::ConstParams params, const MixedState& state,
                      const Vec& hidden, std::span<const Action> queue, int p) {
  require(p >= 0, "rollout: negative step count");
  require(static_cast<std::size_t>(p) <= queue.size(),
          "rollout: p = " + std::to_string(p) + " exceeds the delay d = " + std::to_string(queue.size()));
  PredictiveModel::Unroll u;
  model.unroll(params, model.lift_flat(state), hidden, queue.first(static_cast<std::size_t>(p)), u);
  const Vec& d = u.final_dist();
  return {unflatten({d.data(), static_cast<std::size_t>(d.size())}, model.schema()), u.final_hidden()};
}

double PredictionStats::rmse() const {
  return continuous == 0 ? 0.0 : std::sqrt(squared_error / static_cast<double>(continuous));
}

void PredictionStats::merge(const PredictionStats& o) {
  loss += o.loss;
  terms += o.terms;
  slots += o.slots;
  slots_correct += o.slots_correct;
  continuous += o.continuous;
  squared_error += o.squared_error;
}

double prediction_loss(const PredictiveModel& model, const Vec& pred, const MixedState& truth, Vec* d_pred,
                       PredictionStats* stats) {
  const StateSchema& schema = model.schema();
  const int nc = schema.n_continuous;
  if (d_pred != nullptr) d_pred->setZero(pred.size());
  double loss = 0.0;
  double sq = 0.0;
  for (int i = 0; i < nc; ++i) {
    const double diff = pred(i) - truth.continuous[i];
    sq += diff * diff;
    if (d_pred != nullptr) (*d_pred)(i) = 2.0 * diff;
  }
  loss += sq;
  int pos = nc;
  std::size_t correct = 0;
  for (std::size_t k = 0; k < schema.categorical_cards.size(); ++k) {
    const int card = schema.categorical_cards[k];
    const int target = truth.categorical[k].index;
    const Vec logits = pred.segment(pos, card);
    Vec d_logits;
    loss += nn::cross_entropy(logits, target, d_pred != nullptr ? &d_logits : nullptr);
    if (d_pred != nullptr) d_pred->segment(pos, card) = d_logits;
    if (argmax({logits.data(), static_cast<std::size_t>(card)}) == target) ++correct;
    pos += card;
  }
  if (stats != nullptr) {
    stats->loss += loss;
    stats->terms += 1;
    stats->slots += schema.categorical_cards.size();
    stats->slots_correct += correct;
    stats->continuous += static_cast<std::size_t>(nc);
    stats->squared_error += sq;
  }
  return loss;
}

ModelLossResult model_loss(const PredictiveModel& model, nn::ConstParams params, const TransitionSequence& seq,
                           int K) {
  require(K >= 1, "model_loss: unroll K must be >= 1");
  const std::size_t n_states = seq.states.size();
  require(n_states >= static_cast<std::size_t>(K) + 1,
          "model_loss: sequence of " + std::to_string(n_states) + " states is too short for K = " +
              std::to_string(K));
  require(seq.executed.size() + 1 == n_states, "model_loss: need one executed action per transition");
  require(seq.hidden.size() + 1 >= n_states, "model_loss: need a core state per anchor");

  ModelLossResult out;
  out.grads.assign(params.size(), 0.0);
  const std::size_t anchors = n_states - static_cast<std::size_t>(K);
  const double scale = 1.0 / static_cast<double>(anchors * static_cast<std::size_t>(K));

  PredictiveModel::Unroll u;
  std::vector<Vec> d_dists(static_cast<std::size_t>(K));
  for (std::size_t t = 0; t < anchors; ++t) {
    std::span<const Action> actions(seq.executed.data() + t, static_cast<std::size_t>(K));
    model.unroll(params, model.lift_flat(seq.states[t]), seq.hidden[t], actions, u);
    for (int i = 0; i < K; ++i) {
      prediction_loss(model, u.steps[i].next, seq.states[t + i + 1], &d_dists[i], &out.stats);
      d_dists[i] *= scale;
    }
    model.unroll_backward(params, u, d_dists, out.grads);
  }
  out.loss = out.stats.loss * scale;
  if (!std::isfinite(out.loss)) throw TrainingError("model_loss: non-finite loss");
  return out;
}

}  // namespace drl::predictor
