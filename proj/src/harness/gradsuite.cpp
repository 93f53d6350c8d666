#include "drl/harness/gradsuite.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "drl/agents/learner.hpp"
#include "drl/envs/delay.hpp"
#include "drl/nn/gradcheck.hpp"
#include "drl/nn/gru.hpp"
#include "drl/nn/layers.hpp"
#include "drl/predictor/model.hpp"

namespace drl::harness {

using nn::Vec;

StateSchema tiny_schema() { return StateSchema{2, {3, 2}}; }

MixedState random_state(const StateSchema& schema, RngStream& rng) {
  MixedState s;
  for (int i = 0; i < schema.n_continuous; ++i) s.continuous.push_back(rng.uniform(-1.0, 1.0));
  for (int card : schema.categorical_cards) s.categorical.push_back({card, rng.uniform_int(card)});
  return s;
}

agents::Trajectory random_trajectory(const StateSchema& schema, int n_actions, int d, int length, RngStream& rng) {
  agents::Trajectory tr;
  envs::DelayQueue queue(d);
  for (int t = 0; t < length; ++t) {
    agents::TrajectoryStep st;
    st.state = random_state(schema, rng);
    st.queue = queue.snapshot();
    st.chosen = Action{rng.uniform_int(n_actions)};
    st.executed = queue.push(st.chosen);
    st.reward = rng.normal();
    st.behavior_logprob = std::log(rng.uniform(0.1, 0.9));
    tr.steps.push_back(std::move(st));
  }
  tr.final_state = random_state(schema, rng);
  tr.terminal = false;
  return tr;
}

namespace {

std::vector<double> random_params(std::size_t n, RngStream& rng, double scale) {
  std::vector<double> p(n);
  for (auto& v : p) v = scale * rng.normal();
  return p;
}

Vec random_vec(int n, RngStream& rng) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.uniform(-1.0, 1.0);
  return v;
}

double dense_case(std::uint64_t seed, std::size_t& n_params) {
  double worst = 0.0;
  const std::pair<nn::Activation, nn::Activation> acts[] = {
      {nn::Activation::tanh, nn::Activation::identity},
      {nn::Activation::relu, nn::Activation::sigmoid},
      {nn::Activation::sigmoid, nn::Activation::tanh},
  };
  for (std::size_t k = 0; k < std::size(acts); ++k) {
    RngStream rng(seed, 10 + k);
    nn::ParamLayout layout;
    nn::Mlp mlp(layout, 5, {6, 4}, 3, acts[k].first, acts[k].second);
    auto params = random_params(layout.size(), rng, 0.7);
    n_params = layout.size();
    const Vec x = random_vec(5, rng);
    const Vec w = random_vec(3, rng);
    nn::Mlp::Cache cache;
    const Vec y = mlp.forward(params, x, cache);
    std::vector<double> grads(params.size(), 0.0);
    mlp.backward(params, cache, w, grads);
    const auto loss = [&] {
      nn::Mlp::Cache c;
      return w.dot(mlp.forward(params, x, c));
    };
    worst = std::max(worst, nn::check_gradients(params, grads, loss).max_rel_error);
  }
  return worst;
}

double gru_case(std::uint64_t seed, std::size_t& n_params) {
  RngStream rng(seed, 20);
  nn::ParamLayout layout;
  nn::GruCell cell(layout, 4, 5);
  std::vector<double> params(layout.size());
  cell.init(params, rng);
  for (auto& v : params) v += 0.2 * rng.normal();
  n_params = params.size();
  const int T = 4;
  std::vector<Vec> xs;
  for (int t = 0; t < T; ++t) xs.push_back(random_vec(4, rng));
  const Vec h0 = 0.5 * random_vec(5, rng);
  const Vec w = random_vec(5, rng);
  const auto run = [&](std::vector<nn::GruCell::Cache>& caches) {
    Vec h = h0;
    caches.resize(T);
    for (int t = 0; t < T; ++t) {
      cell.forward(params, xs[t], h, caches[t]);
      h = caches[t].h_next;
    }
    return w.dot(h);
  };
  std::vector<nn::GruCell::Cache> caches;
  run(caches);
  std::vector<double> grads(params.size(), 0.0);
  Vec dh = w, dx, dh_prev;
  for (int t = T - 1; t >= 0; --t) {
    cell.backward(params, caches[t], dh, grads, dx, dh_prev);
    dh = dh_prev;
  }
  const auto loss = [&] {
    std::vector<nn::GruCell::Cache> c;
    return run(c);
  };
  return nn::check_gradients(params, grads, loss).max_rel_error;
}

struct TinyModel {
  StateSchema schema = tiny_schema();
  int n_actions = 3;
  nn::ParamLayout layout;
  predictor::PredictiveModel model{layout, schema, n_actions, predictor::PredictorSizes{4, 3}};
  std::vector<double> params;

  explicit TinyModel(RngStream& rng) {
    params.resize(layout.size());
    model.init(params, rng);
    for (auto& v : params) v += 0.1 * rng.normal();
  }
};

double unroll_case(std::uint64_t seed, int p, std::size_t& n_params) {
  RngStream rng(seed, 30 + static_cast<std::uint64_t>(p));
  TinyModel m(rng);
  n_params = m.params.size();
  const Vec dist0 = m.model.lift_flat(random_state(m.schema, rng)) + 0.3 * random_vec(m.schema.dist_size(), rng);
  const Vec h0 = 0.5 * random_vec(m.model.hidden_size(), rng);
  std::vector<Action> actions;
  for (int i = 0; i < p; ++i) actions.push_back(Action{rng.uniform_int(m.n_actions)});
  std::vector<Vec> ws;
  for (int i = 0; i < p; ++i) ws.push_back(random_vec(m.schema.dist_size(), rng));
  // Read the final prediction through the soft encoding, as the policy does.
  const Vec we = random_vec(m.schema.encoded_size(), rng);
  const auto forward = [&](predictor::PredictiveModel::Unroll& u) {
    m.model.unroll(m.params, dist0, h0, actions, u);
    double l = 0.0;
    for (int i = 0; i < p; ++i) l += ws[i].dot(u.steps[i].next);
    return l + we.dot(m.model.soft_encode(u.final_dist()));
  };
  predictor::PredictiveModel::Unroll u;
  forward(u);
  std::vector<Vec> d(ws.begin(), ws.end());
  std::vector<Vec> probs;
  m.model.soft_encode(u.final_dist(), &probs);
  d.back() += m.model.soft_encode_backward(probs, we);
  std::vector<double> grads(m.params.size(), 0.0);
  m.model.unroll_backward(m.params, u, d, grads);
  const auto loss = [&] {
    predictor::PredictiveModel::Unroll v;
    return forward(v);
  };
  return nn::check_gradients(m.params, grads, loss).max_rel_error;
}

double model_loss_case(std::uint64_t seed, std::size_t& n_params) {
  RngStream rng(seed, 40);
  TinyModel m(rng);
  n_params = m.params.size();
  predictor::TransitionSequence seq;
  Vec h = m.model.initial_hidden();
  for (int t = 0; t < 7; ++t) {
    seq.states.push_back(random_state(m.schema, rng));
    if (t < 6) {
      seq.executed.push_back(Action{rng.uniform_int(m.n_actions)});
      seq.hidden.push_back(h);
      h = m.model.advance_hidden(m.params, seq.states.back(), h);
    }
  }
  // Core states are data here, recorded with the unperturbed parameters.
  const auto res = predictor::model_loss(m.model, m.params, seq, 3);
  const auto loss = [&] { return predictor::model_loss(m.model, m.params, seq, 3).loss; };
  return nn::check_gradients(m.params, res.grads, loss).max_rel_error;
}

double learner_case(std::uint64_t seed, int d, int p, std::size_t& n_params) {
  RngStream rng(seed, 50 + static_cast<std::uint64_t>(10 * d + p));
  const StateSchema schema = tiny_schema();
  agents::AgentConfig cfg;
  cfg.d = d;
  cfg.p = p;
  cfg.unroll = 8;
  cfg.hidden = 6;
  cfg.layers = 1;
  cfg.predictor = {4, 3};
  cfg.entropy_weight = 0.05;
  cfg.model_unroll = p > 0 ? std::min(d, 2) : 0;
  cfg.gamma = 0.9;
  const agents::AgentNets nets(schema, 3, cfg);
  auto params = nets.init_params(rng);
  for (auto& v : params) v += 0.1 * rng.normal();
  n_params = params.size();
  std::vector<agents::Trajectory> batch;
  for (int b = 0; b < 2; ++b) {
    auto tr = random_trajectory(schema, 3, d, 6 + b, rng);
    tr.terminal = b == 1;
    Vec h = agents::initial_hidden(nets);
    for (auto& st : tr.steps) {
      st.hidden = h;
      if (nets.model() != nullptr) h = nets.model()->advance_hidden(params, st.state, h);
    }
    batch.push_back(std::move(tr));
  }
  const auto report = agents::learner_loss(nets, params, batch);
  const auto targets = report.targets;
  const auto loss = [&] { return agents::learner_loss(nets, params, batch, &targets).total; };
  return nn::check_gradients(params, report.grads, loss).max_rel_error;
}

}  // namespace

std::vector<GradSuiteResult> run_gradient_suites(int seeds) {
  struct Suite {
    std::string name;
    std::function<double(std::uint64_t, std::size_t&)> run;
  };
  const std::vector<Suite> suites = {
      {"dense_stack", dense_case},
      {"gru_through_time", gru_case},
      {"predictor_unroll_p1", [](std::uint64_t s, std::size_t& n) { return unroll_case(s, 1, n); }},
      {"predictor_unroll_p3", [](std::uint64_t s, std::size_t& n) { return unroll_case(s, 3, n); }},
      {"predictor_model_loss_k3", model_loss_case},
      {"learner_loss_d2_p0", [](std::uint64_t s, std::size_t& n) { return learner_case(s, 2, 0, n); }},
      {"learner_loss_d3_p1", [](std::uint64_t s, std::size_t& n) { return learner_case(s, 3, 1, n); }},
      {"learner_loss_d2_p2", [](std::uint64_t s, std::size_t& n) { return learner_case(s, 2, 2, n); }},
  };
  std::vector<GradSuiteResult> out;
  for (const auto& s : suites) {
    GradSuiteResult r;
    r.name = s.name;
    r.seeds = seeds;
    for (int k = 0; k < seeds; ++k) {
      r.max_rel_error = std::max(r.max_rel_error, s.run(static_cast<std::uint64_t>(k + 1), r.params));
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace drl::harness
