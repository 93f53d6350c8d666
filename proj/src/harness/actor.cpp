#include "drl/harness/actor.hpp"

namespace drl::harness {

Actor::Actor(std::unique_ptr<envs::Environment> env, const agents::AgentConfig& config, RngStream env_rng,
             RngStream policy_rng, bool collect)
    : env_(std::move(env), config.d, config.f),
      env_rng_(env_rng),
      policy_rng_(policy_rng),
      collect_(collect),
      builder_(config.unroll, config.d) {}

void Actor::begin(const agents::AgentNets& nets) {
  state_ = env_.reset(env_rng_);
  queue_ = env_.queue();
  hidden_ = agents::initial_hidden(nets);
  builder_.clear();
  return_ = 0.0;
  fresh_ = false;
}

Actor::Step Actor::step(const agents::AgentNets& nets, nn::ConstParams params, bool greedy) {
  if (fresh_) begin(nets);
  auto a = agents::act(nets, params, state_, queue_, hidden_, policy_rng_, greedy);
  auto r = env_.step(a.action);
  return_ += r.reward;
  Step out;
  if (collect_) {
    agents::TrajectoryStep st{std::move(state_), std::move(queue_), a.action, r.executed, r.reward, a.logprob,
                              std::move(hidden_)};
    out.trajectory = builder_.add(std::move(st), r.state, r.terminal);
  }
  state_ = std::move(r.state);
  queue_ = std::move(r.queue);
  hidden_ = std::move(a.hidden_next);
  if (r.terminal) {
    out.episode_done = true;
    out.episode_return = return_;
    fresh_ = true;
  }
  return out;
}

double Actor::episode(const agents::AgentNets& nets, nn::ConstParams params, bool greedy) {
  fresh_ = true;
  for (;;) {
    auto s = step(nets, params, greedy);
    if (s.episode_done) return s.episode_return;
  }
}

Seat::Seat(const agents::AgentConfig& config, RngStream rng, bool collect_)
    : policy_rng(rng), collect(collect_), builder(config.unroll, config.d) {}

void Seat::begin(const agents::AgentNets& nets, const MixedState& s, std::vector<Action> q) {
  state = s;
  queue = std::move(q);
  hidden = agents::initial_hidden(nets);
  builder.clear();
  episode_return = 0.0;
}

Action Seat::choose(const agents::AgentNets& nets, nn::ConstParams params, bool greedy) {
  auto a = agents::act(nets, params, state, queue, hidden, policy_rng, greedy);
  pending.chosen = a.action;
  pending.behavior_logprob = a.logprob;
  hidden_next = std::move(a.hidden_next);
  return a.action;
}

std::optional<agents::Trajectory> Seat::observe(Action executed, double reward, const MixedState& next,
                                                std::vector<Action> q, bool terminal) {
  episode_return += reward;
  std::optional<agents::Trajectory> out;
  if (collect) {
    pending.state = std::move(state);
    pending.queue = std::move(queue);
    pending.executed = executed;
    pending.reward = reward;
    pending.hidden = std::move(hidden);
    out = builder.add(std::move(pending), next, terminal);
    pending = {};
  }
  state = next;
  queue = std::move(q);
  hidden = std::move(hidden_next);
  return out;
}

}  // namespace drl::harness
