#pragma once

#include <span>
#include <vector>

namespace drl::agents {

/// Returns credited to decisions under delay d:
///   R_{t+d} = r_{t+d} + gamma r_{t+d+1} + ... + gamma^k bootstrap
/// for t = 0 .. T-d-1. Rewards r_t .. r_{t+d-1} never reach a_t.
/// Requires T > d.
std::vector<double> delayed_returns(std::span<const double> rewards, double bootstrap, int d, double gamma);

struct VTraceResult {
  std::vector<double> vs;          // value targets
  std::vector<double> advantages;  // rho_s (r_s + gamma v_{s+1} - V(x_s))
};

/// V-trace targets over one sequence of n steps:
///   rho_t = min(rho_bar, pi/mu), c_t = min(c_bar, pi/mu)
///   v_s   = V(x_s) + sum_{t>=s} gamma^{t-s} (prod_{i<t} c_i) rho_t (r_t + gamma V(x_{t+1}) - V(x_t))
/// `values` holds V(x_0..x_{n-1}) and `bootstrap` is V(x_n).
VTraceResult vtrace_targets(std::span<const double> behavior_logp, std::span<const double> target_logp,
                            std::span<const double> values, double bootstrap, std::span<const double> rewards,
                            double gamma, double rho_bar, double c_bar);

}  // namespace drl::agents
