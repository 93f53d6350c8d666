#include "drl/agents/returns.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "drl/core/errors.hpp"

namespace drl::agents {

std::vector<double> delayed_returns(std::span<const double> rewards, double bootstrap, int d, double gamma) {
  const int T = static_cast<int>(rewards.size());
  require(d >= 0, "delayed_returns: negative delay");
  require(T > d, "delayed_returns: trajectory of length " + std::to_string(T) +
                     " is too short to train with d = " + std::to_string(d));
  const int n = T - d;
  std::vector<double> out(static_cast<std::size_t>(n));
  double acc = bootstrap;
  for (int t = T - 1; t >= d; --t) {
    acc = rewards[static_cast<std::size_t>(t)] + gamma * acc;
    out[static_cast<std::size_t>(t - d)] = acc;
  }
  return out;
}

VTraceResult vtrace_targets(std::span<const double> behavior_logp, std::span<const double> target_logp,
                            std::span<const double> values, double bootstrap, std::span<const double> rewards,
                            double gamma, double rho_bar, double c_bar) {
  const std::size_t n = rewards.size();
  require(behavior_logp.size() == n && target_logp.size() == n && values.size() == n,
          "vtrace: inputs must have equal lengths");
  require(rho_bar > 0.0 && c_bar > 0.0, "vtrace: clips must be positive");
  VTraceResult out;
  out.vs.resize(n);
  out.advantages.resize(n);
  std::vector<double> rho(n), c(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double ratio = std::exp(target_logp[t] - behavior_logp[t]);
    if (!std::isfinite(ratio)) throw TrainingError("vtrace: non-finite importance ratio");
    rho[t] = std::min(rho_bar, ratio);
    c[t] = std::min(c_bar, ratio);
  }
  // v_s - V(x_s) = delta_s + gamma c_s (v_{s+1} - V(x_{s+1}))
  double next_value = bootstrap;
  double next_vs = bootstrap;
  double acc = 0.0;
  for (std::size_t s = n; s-- > 0;) {
    const double delta = rho[s] * (rewards[s] + gamma * next_value - values[s]);
    acc = delta + gamma * c[s] * acc;
    out.vs[s] = values[s] + acc;
    out.advantages[s] = rho[s] * (rewards[s] + gamma * next_vs - values[s]);
    next_value = values[s];
    next_vs = out.vs[s];
  }
  return out;
}

}  // namespace drl::agents
