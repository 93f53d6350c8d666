#pragma once

#include <span>
#include <vector>

#include "drl/core/rng.hpp"
#include "drl/core/types.hpp"
#include "drl/nn/gru.hpp"
#include "drl/nn/layers.hpp"

namespace drl::predictor {

struct PredictorSizes {
  int gru_hidden = 128;
  int head_hidden = 128;
};

/// Current prediction s_{t,i} together with the recurrent core's h_{t,i}.
struct PredictorState {
  StateDistribution dist;
  nn::Vec hidden;
};

/// Residual action-conditional transition model
///
///   next = F * (s + D) + (1 - F) * N
///
/// computed component-wise on the flat distribution (continuous means, then
/// categorical logits). D ("delta"), N ("new") and F ("forget", sigmoid
/// output in [0, 1]) are one-hidden-layer networks on top of a shared GRU
/// core. Each step the core consumes the soft encoding of s (continuous
/// values plus softmax probabilities) and the heads see
/// [soft encoding, one-hot action, core output].
class PredictiveModel {
 public:
  struct StepCache {
    nn::Vec dist;
    nn::Vec encoded;
    std::vector<nn::Vec> probs;  // softmax per categorical slot
    Action action;
    nn::Vec head_input;
    nn::GruCell::Cache core;
    nn::Mlp::Cache delta;
    nn::Mlp::Cache fresh;
    nn::Mlp::Cache forget;
    nn::Vec next;

    const nn::Vec& hidden_next() const { return core.h_next; }
  };

  /// L predictor steps from (dist0, h0). steps[i].next is s_{t,i+1}.
  struct Unroll {
    std::vector<StepCache> steps;
    std::size_t length = 0;
    nn::Vec dist0;
    nn::Vec h0;

    const nn::Vec& final_dist() const { return length == 0 ? dist0 : steps[length - 1].next; }
    const nn::Vec& final_hidden() const { return length == 0 ? h0 : steps[length - 1].core.h_next; }
  };

  PredictiveModel(nn::ParamLayout& layout, StateSchema schema, int n_actions, PredictorSizes sizes);

  const StateSchema& schema() const { return schema_; }
  int n_actions() const { return n_actions_; }
  int hidden_size() const { return core_.hidden(); }
  int dist_size() const { return schema_.dist_size(); }
  const nn::GruCell& core() const { return core_; }
  const nn::Mlp& delta_head() const { return delta_; }
  const nn::Mlp& new_head() const { return fresh_; }
  const nn::Mlp& forget_head() const { return forget_; }

  void init(nn::MutParams params, RngStream& rng) const;

  nn::Vec lift_flat(const MixedState& s) const;
  nn::Vec soft_encode(const nn::Vec& dist, std::vector<nn::Vec>* probs = nullptr) const;
  nn::Vec soft_encode_backward(const std::vector<nn::Vec>& probs, const nn::Vec& d_encoded) const;

  void step_forward(nn::ConstParams params, const nn::Vec& dist, Action action, const nn::Vec& h,
                    StepCache& cache) const;
  void step_backward(nn::ConstParams params, const StepCache& cache, const nn::Vec& d_next,
                     const nn::Vec& d_hidden_next, nn::MutParams grads, nn::Vec& d_dist, nn::Vec& d_hidden) const;

  /// Runs one predictor step per action. Throws TrainingError when a
  /// prediction turns non-finite.
  void unroll(nn::ConstParams params, const nn::Vec& dist0, const nn::Vec& h0, std::span<const Action> actions,
              Unroll& out) const;
  /// d_dists[i] is dL/d(steps[i].next); entries may be empty for "no
  /// gradient". Parameter gradients accumulate into `grads`.
  void unroll_backward(nn::ConstParams params, const Unroll& unroll, std::span<const nn::Vec> d_dists,
                       nn::MutParams grads) const;

  /// Core update on an observed state: h_{t+1} = GRU(soft(lift(s_t)), h_t).
  nn::Vec advance_hidden(nn::ConstParams params, const MixedState& s, const nn::Vec& h) const;
  nn::Vec initial_hidden() const { return nn::Vec::Zero(hidden_size()); }

 private:
  StateSchema schema_;
  int n_actions_;
  nn::GruCell core_;
  nn::Mlp delta_;
  nn::Mlp fresh_;
  nn::Mlp forget_;
};

PredictorState predict_one(const PredictiveModel& model, nn::ConstParams params, const PredictorState& state,
                           Action action);

struct RolloutResult {
  StateDistribution dist;  // s_{t,p}
  nn::Vec hidden;          // h_{t,p}
};

/// s_{t,0} = lift(s_t), s_{t,i+1} = P(s_{t,i}, queue[i]) for i < p. `queue`
/// is the full delay queue (oldest first); only its oldest p entries are
/// consumed.
RolloutResult rollout(const PredictiveModel& model, nn::ConstParams params, const MixedState& state,
                      const nn::Vec& hidden, std::span<const Action> queue, int p);

/// Observed states s_0..s_n with the executed actions a_0..a_{n-1} between
/// them and the core state h_t recorded at each anchor.
struct TransitionSequence {
  std::vector<MixedState> states;
  std::vector<Action> executed;
  std::vector<nn::Vec> hidden;
};

struct PredictionStats {
  double loss = 0.0;
  std::size_t terms = 0;
  std::size_t slots = 0;
  std::size_t slots_correct = 0;
  std::size_t continuous = 0;
  double squared_error = 0.0;

  double accuracy() const { return slots == 0 ? 1.0 : static_cast<double>(slots_correct) / slots; }
  double rmse() const;
  void merge(const PredictionStats& other);
};

/// Squared error on continuous means plus cross-entropy per categorical slot.
/// Writes dL/dpred when `d_pred` is set and updates `stats`.
double prediction_loss(const PredictiveModel& model, const nn::Vec& pred, const MixedState& truth,
                       nn::Vec* d_pred, PredictionStats* stats);

struct ModelLossResult {
  double loss = 0.0;  // mean over anchors and unroll steps
  std::vector<double> grads;
  PredictionStats stats;
};

/// Unrolls K steps from every anchor t with t + K <= n, using the executed
/// actions, and regresses s_{t,i} onto s_{t+i}.
ModelLossResult model_loss(const PredictiveModel& model, nn::ConstParams params, const TransitionSequence& seq,
                           int K);

}  // namespace drl::predictor
