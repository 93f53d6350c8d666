#include "drl/harness/model_fit.hpp"

#include <algorithm>
#include <cmath>

#include "drl/core/errors.hpp"
#include "drl/envs/worlds.hpp"
#include "drl/nn/adam.hpp"

namespace drl::harness {

using nn::Vec;

namespace {

MixedState chain_state(int n, int cell) {
  MixedState s;
  s.continuous.push_back(static_cast<double>(cell) / (n - 1));
  s.categorical.push_back({n, cell});
  return s;
}

// Core states seen along a random walk that ends in each cell.
std::vector<std::pair<int, Vec>> history_anchors(const predictor::PredictiveModel& model, nn::ConstParams params,
                                                 int n, RngStream& rng, int walks, int length) {
  std::vector<std::pair<int, Vec>> out;
  for (int w = 0; w < walks; ++w) {
    int cell = rng.uniform_int(n);
    Vec h = model.initial_hidden();
    for (int t = 0; t < length; ++t) {
      out.emplace_back(cell, h);
      h = model.advance_hidden(params, chain_state(n, cell), h);
      cell = envs::ChainWorld::next_cell(n, cell, Action{rng.uniform_int(2)});
    }
  }
  return out;
}

}  // namespace

ChainFitReport measure_chain_predictor(const predictor::PredictiveModel& model, nn::ConstParams params, int n,
                                       std::uint64_t seed) {
  RngStream rng(seed, 7);
  auto anchors = history_anchors(model, params, n, rng, 20, 12);
  for (int c = 0; c < n; ++c) anchors.emplace_back(c, model.initial_hidden());

  ChainFitReport r;
  predictor::PredictionStats stats;
  for (const auto& [cell, h] : anchors) {
    for (int a = 0; a < 2; ++a) {
      const auto next = predictor::predict_one(model, params, {lift(chain_state(n, cell), model.schema()), h}, Action{a});
      const auto flat = flatten(next.dist);
      predictor::prediction_loss(model, Eigen::Map<const Vec>(flat.data(), static_cast<Eigen::Index>(flat.size())),
                                 chain_state(n, envs::ChainWorld::next_cell(n, cell, Action{a})), nullptr, &stats);
    }
    for (int q = 0; q < 8; ++q) {
      const std::vector<Action> queue{Action{(q >> 2) & 1}, Action{(q >> 1) & 1}, Action{q & 1}};
      int truth = cell;
      for (const auto& a : queue) truth = envs::ChainWorld::next_cell(n, truth, a);
      const auto roll = predictor::rollout(model, params, chain_state(n, cell), h, queue, 3);
      const MixedState got = decode_hard(roll.dist, model.schema());
      const MixedState want = chain_state(n, truth);
      const double err = std::abs(got.continuous[0] - want.continuous[0]);
      r.rollout_max_continuous_error = std::max(r.rollout_max_continuous_error, err);
      ++r.rollout_cases;
      if (got.categorical == want.categorical && err <= kRolloutContinuousTolerance) ++r.rollout_exact;
    }
  }
  r.one_step_accuracy = stats.accuracy();
  r.one_step_rmse = stats.rmse();
  return r;
}

ChainFitReport fit_chain_predictor(const ChainFitConfig& cfg) {
  require(cfg.n >= 2 && cfg.K >= 1 && cfg.sequence_length > cfg.K, "chain fit: bad sizes");
  const StateSchema schema{1, {cfg.n}};
  nn::ParamLayout layout;
  const predictor::PredictiveModel model(layout, schema, 2, cfg.sizes);
  std::vector<double> params(layout.size());
  RngStream rng(cfg.seed, 1);
  model.init(params, rng);
  nn::AdamConfig ac;
  ac.lr = cfg.lr;
  nn::Adam adam(params.size(), ac);

  ChainFitReport report;
  std::vector<double> grads(params.size());
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    std::fill(grads.begin(), grads.end(), 0.0);
    double loss = 0.0;
    for (int b = 0; b < cfg.batch; ++b) {
      predictor::TransitionSequence seq;
      int cell = rng.uniform_int(cfg.n);
      Vec h = model.initial_hidden();
      for (int t = 0; t < cfg.sequence_length; ++t) {
        seq.states.push_back(chain_state(cfg.n, cell));
        if (t + 1 == cfg.sequence_length) break;
        const Action a{rng.uniform_int(2)};
        seq.executed.push_back(a);
        seq.hidden.push_back(h);
        h = model.advance_hidden(params, seq.states.back(), h);
        cell = envs::ChainWorld::next_cell(cfg.n, cell, a);
      }
      const auto res = predictor::model_loss(model, params, seq, cfg.K);
      loss += res.loss / cfg.batch;
      for (std::size_t i = 0; i < grads.size(); ++i) grads[i] += res.grads[i] / cfg.batch;
    }
    // Cosine decay from lr to final_lr over the iteration budget.
    const double frac = static_cast<double>(it) / cfg.max_iterations;
    adam.set_learning_rate(cfg.final_lr + 0.5 * (cfg.lr - cfg.final_lr) * (1.0 + std::cos(M_PI * frac)));
    adam.step(params, grads);
    report.iterations = it;
    report.final_loss = loss;
    if (it % cfg.check_every == 0 || it == cfg.max_iterations) {
      auto m = measure_chain_predictor(model, params, cfg.n, cfg.seed);
      m.iterations = it;
      m.final_loss = loss;
      report = m;
      if (m.accuracy_ok() && m.rmse_ok() && m.rollout_ok()) break;
    }
  }
  return report;
}

}  // namespace drl::harness
