#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "drl/agents/agent.hpp"
#include "drl/agents/checkpoint.hpp"
#include "drl/agents/learner.hpp"
#include "drl/agents/returns.hpp"
#include "drl/agents/trajectory.hpp"
#include "drl/core/errors.hpp"
#include "drl/harness/gradsuite.hpp"

namespace drl::agents {
namespace {

TEST(DelayedReturns, GeometricSum) {
  const std::vector<double> r{1, 1, 1, 1, 1};
  const auto R = delayed_returns(r, 0.0, 2, 0.5);
  ASSERT_EQ(R.size(), 3u);
  EXPECT_DOUBLE_EQ(R[0], 1.75);
  EXPECT_DOUBLE_EQ(R[1], 1.5);
  EXPECT_DOUBLE_EQ(R[2], 1.0);
}

TEST(DelayedReturns, ZeroDiscountIsShiftedReward) {
  const std::vector<double> r{0.5, -1, 2, 3, 4};
  const auto R = delayed_returns(r, 7.0, 3, 0.0);
  ASSERT_EQ(R.size(), 2u);
  EXPECT_EQ(R[0], 3.0);
  EXPECT_EQ(R[1], 4.0);
}

TEST(DelayedReturns, Bootstrap) {
  const std::vector<double> r{0, 0, 1};
  const auto R = delayed_returns(r, 10.0, 1, 0.9);
  EXPECT_DOUBLE_EQ(R[1], 1.0 + 0.9 * 10.0);
  EXPECT_DOUBLE_EQ(R[0], 0.9 * R[1]);
  EXPECT_THROW(delayed_returns(r, 0.0, 3, 0.9), ContractViolation);
}

// Direct evaluation of the truncated importance-weighted sums.
std::vector<double> vtrace_oracle(const std::vector<double>& ratio, const std::vector<double>& V, double boot,
                                  const std::vector<double>& r, double gamma, double rho_bar, double c_bar) {
  const std::size_t n = r.size();
  std::vector<double> vs(n);
  for (std::size_t s = 0; s < n; ++s) {
    double sum = 0.0;
    for (std::size_t t = s; t < n; ++t) {
      double prod = 1.0;
      for (std::size_t i = s; i < t; ++i) prod *= std::min(c_bar, ratio[i]);
      const double next = t + 1 < n ? V[t + 1] : boot;
      sum += std::pow(gamma, static_cast<double>(t - s)) * prod * std::min(rho_bar, ratio[t]) *
             (r[t] + gamma * next - V[t]);
    }
    vs[s] = V[s] + sum;
  }
  return vs;
}

TEST(VTrace, MatchesDirectSum) {
  const std::vector<double> ratio{2.0, 0.5, 1.0};
  const std::vector<double> V{0.3, -0.2, 0.7};
  const std::vector<double> r{1.0, 0.5, -0.25};
  std::vector<double> mu, pi;
  for (double q : ratio) {
    mu.push_back(std::log(0.25));
    pi.push_back(std::log(0.25 * q));
  }
  const auto res = vtrace_targets(mu, pi, V, 0.4, r, 0.9, 1.0, 1.0);
  const auto oracle = vtrace_oracle(ratio, V, 0.4, r, 0.9, 1.0, 1.0);
  for (std::size_t s = 0; s < 3; ++s) EXPECT_NEAR(res.vs[s], oracle[s], 1e-12);
  for (std::size_t s = 0; s < 3; ++s) {
    const double next = s + 1 < 3 ? res.vs[s + 1] : 0.4;
    EXPECT_NEAR(res.advantages[s], std::min(1.0, ratio[s]) * (r[s] + 0.9 * next - V[s]), 1e-12);
  }
}

TEST(VTrace, LooseClipsMatchDirectSum) {
  RngStream rng(4, 1);
  std::vector<double> ratio, V, r, mu, pi;
  for (int i = 0; i < 12; ++i) {
    ratio.push_back(rng.uniform(0.2, 3.0));
    V.push_back(rng.normal());
    r.push_back(rng.normal());
    mu.push_back(std::log(0.2));
    pi.push_back(std::log(0.2 * ratio.back()));
  }
  const auto res = vtrace_targets(mu, pi, V, -0.3, r, 0.95, 2.0, 1.5);
  const auto oracle = vtrace_oracle(ratio, V, -0.3, r, 0.95, 2.0, 1.5);
  for (std::size_t s = 0; s < r.size(); ++s) EXPECT_NEAR(res.vs[s], oracle[s], 1e-12);
}

TEST(VTrace, OnPolicyCollapsesToNStepReturns) {
  RngStream rng(5, 1);
  std::vector<double> V, r, logp;
  for (int i = 0; i < 10; ++i) {
    V.push_back(rng.normal());
    r.push_back(rng.normal());
    logp.push_back(std::log(rng.uniform(0.1, 1.0)));
  }
  const double boot = 0.8, gamma = 0.97;
  const auto res = vtrace_targets(logp, logp, V, boot, r, gamma, 1.0, 1.0);
  for (std::size_t s = 0; s < r.size(); ++s) {
    double g = boot;
    for (std::size_t t = r.size(); t-- > s;) g = r[t] + gamma * g;
    EXPECT_NEAR(res.vs[s], g, 1e-12);
  }
}

AgentConfig small_config(int d, int p) {
  AgentConfig c;
  c.d = d;
  c.p = p;
  c.unroll = 10;
  c.hidden = 8;
  c.layers = 1;
  c.predictor = {6, 6};
  c.gamma = 0.9;
  return c;
}

Trajectory with_hidden(const AgentNets& nets, nn::ConstParams params, Trajectory tr) {
  nn::Vec h = initial_hidden(nets);
  for (auto& st : tr.steps) {
    st.hidden = h;
    if (nets.model() != nullptr) h = nets.model()->advance_hidden(params, st.state, h);
  }
  return tr;
}

TEST(Learner, ZeroingEarlyRewardsLeavesPolicyGradientIdentical) {
  const StateSchema schema = harness::tiny_schema();
  for (int d : {1, 3}) {
    for (int p : {0, d}) {
      const AgentNets nets(schema, 3, small_config(d, p));
      RngStream rng(11, static_cast<std::uint64_t>(10 * d + p));
      const auto params = nets.init_params(rng);
      for (int k = 0; k < 25; ++k) {
        const auto tr = with_hidden(nets, params, harness::random_trajectory(schema, 3, d, 10, rng));
        const std::size_t s = static_cast<std::size_t>(rng.uniform_int(static_cast<int>(tr.size()) - d));
        auto zeroed = tr;
        for (std::size_t i = s; i < s + static_cast<std::size_t>(d); ++i) zeroed.steps[i].reward = 0.0;
        const auto g0 = decision_policy_gradient(nets, params, tr, s);
        const auto g1 = decision_policy_gradient(nets, params, zeroed, s);
        EXPECT_EQ(g0, g1);
        // The reward the decision does earn must matter.
        auto shifted = tr;
        shifted.steps[s + static_cast<std::size_t>(d)].reward += 1.0;
        EXPECT_NE(decision_policy_gradient(nets, params, shifted, s), g0);
      }
    }
  }
}

TEST(Learner, CriticIgnoresPredictorAndPolicy) {
  const StateSchema schema = harness::tiny_schema();
  const AgentNets nets(schema, 3, small_config(3, 3));
  RngStream rng(12, 0);
  auto params = nets.init_params(rng);
  const auto tr = with_hidden(nets, params, harness::random_trajectory(schema, 3, 3, 10, rng));
  const auto before = critic_values(nets, params, tr);
  ASSERT_EQ(before.size(), tr.size() - 3 + 1);

  std::vector<bool> is_value(params.size(), false);
  for (const auto& layer : nets.value().layers()) {
    for (std::size_t i = 0; i < static_cast<std::size_t>(layer.in() * layer.out()); ++i) is_value[layer.weight_offset() + i] = true;
    for (std::size_t i = 0; i < static_cast<std::size_t>(layer.out()); ++i) is_value[layer.bias_offset() + i] = true;
  }
  for (std::size_t i = 0; i < params.size(); ++i)
    if (!is_value[i]) params[i] += rng.normal();
  EXPECT_EQ(critic_values(nets, params, tr), before);
}

TEST(Learner, TrainableDecisions) {
  const StateSchema schema = harness::tiny_schema();
  const AgentNets nets(schema, 3, small_config(2, 1));
  RngStream rng(13, 0);
  const auto tr = harness::random_trajectory(schema, 3, 2, 10, rng);
  EXPECT_EQ(trainable_decisions(nets, tr), 8u);
}

TEST(Agent, ActorPredictionMatchesRollout) {
  const StateSchema schema = harness::tiny_schema();
  const AgentNets nets(schema, 3, small_config(3, 2));
  RngStream rng(14, 0);
  const auto params = nets.init_params(rng);
  const auto tr = harness::random_trajectory(schema, 3, 3, 5, rng);
  RngStream act_rng(14, 1);
  for (const auto& st : tr.steps) {
    const nn::Vec h = 0.1 * nn::Vec::Ones(nets.model()->hidden_size());
    const auto a = act(nets, params, st.state, st.queue, h, act_rng);
    const auto r = predictor::rollout(*nets.model(), params, st.state, h, st.queue, 2);
    const auto flat = flatten(r.dist);
    ASSERT_EQ(static_cast<std::size_t>(a.predicted.size()), flat.size());
    for (std::size_t i = 0; i < flat.size(); ++i) EXPECT_EQ(a.predicted(static_cast<Eigen::Index>(i)), flat[i]);
    EXPECT_EQ(a.hidden_next, nets.model()->advance_hidden(params, st.state, h));
  }
}

TEST(Agent, PolicyInputRejectsWrongQueue) {
  const AgentNets nets(harness::tiny_schema(), 3, small_config(2, 0));
  const nn::Vec features = nn::Vec::Zero(harness::tiny_schema().encoded_size());
  const std::vector<Action> short_queue{Action{1}};
  EXPECT_THROW(nets.policy_input(features, short_queue), ContractViolation);
}

TEST(Agent, ConfigValidation) {
  AgentConfig c = small_config(2, 3);
  EXPECT_THROW(c.validate(), ContractViolation);
  c = small_config(2, 2);
  EXPECT_EQ(c.model_horizon(), 2);
  c.p = 0;
  EXPECT_EQ(c.model_horizon(), 1);
}

TEST(Trajectory, UnrollsOverlapByDelay) {
  TrajectoryBuilder b(5, 2);
  std::vector<Trajectory> out;
  for (int t = 0; t < 11; ++t) {
    TrajectoryStep st;
    st.chosen = Action{t};
    if (auto tr = b.add(st, MixedState{}, false)) out.push_back(*tr);
  }
  ASSERT_EQ(out.size(), 3u);
  const int expect_first[] = {0, 3, 6};
  for (std::size_t k = 0; k < 3; ++k) {
    ASSERT_EQ(out[k].size(), 5u);
    EXPECT_EQ(out[k].steps.front().chosen.index, expect_first[k]);
  }
}

TEST(Trajectory, TerminalFlushesAndDropsUntrainableTails) {
  TrajectoryBuilder b(5, 2);
  TrajectoryStep st;
  EXPECT_FALSE(b.add(st, MixedState{}, false));
  const auto short_tail = b.add(st, MixedState{}, true);
  EXPECT_FALSE(short_tail.has_value());
  b.add(st, MixedState{}, false);
  b.add(st, MixedState{}, false);
  const auto tail = b.add(st, MixedState{}, true);
  ASSERT_TRUE(tail.has_value());
  EXPECT_TRUE(tail->terminal);
  EXPECT_EQ(tail->size(), 3u);
}

TEST(Checkpoint, RoundTrip) {
  const StateSchema schema = harness::tiny_schema();
  Checkpoint c;
  c.schema = schema;
  c.n_actions = 3;
  c.config = small_config(3, 2);
  c.config.adam.lr = 3e-4;
  const AgentNets nets(schema, 3, c.config);
  RngStream rng(15, 0);
  c.params = nets.init_params(rng);
  c.adam_steps = 17;
  c.adam_m.assign(c.params.size(), 0.25);
  c.adam_v.assign(c.params.size(), 0.5);
  c.meta = {1234, "chain", "none", "v", "deadbeef", 99};
  const auto path = std::filesystem::temp_directory_path() / "drl_ckpt_test.bin";
  save_checkpoint(path, c);
  const auto back = load_checkpoint(path);
  EXPECT_EQ(back.schema, c.schema);
  EXPECT_EQ(back.params, c.params);
  EXPECT_EQ(back.adam_m, c.adam_m);
  EXPECT_EQ(back.adam_steps, 17);
  EXPECT_EQ(back.config.d, 3);
  EXPECT_EQ(back.config.p, 2);
  EXPECT_EQ(back.config.adam.lr, 3e-4);
  EXPECT_EQ(back.meta.env, "chain");
  EXPECT_EQ(back.meta.seed, 99u);
  EXPECT_THROW(require_compatible(back, StateSchema{1, {}}, 3, "test"), UsageError);
  std::filesystem::remove(path);
}

TEST(Checkpoint, GarbageIsUsageError) {
  const auto path = std::filesystem::temp_directory_path() / "drl_ckpt_garbage.bin";
  {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    std::fputs("not a checkpoint", f);
    std::fclose(f);
  }
  EXPECT_THROW(load_checkpoint(path), UsageError);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace drl::agents
