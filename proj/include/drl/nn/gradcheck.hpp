#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace drl::nn {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t n_checked = 0;
};

/// Relative error used throughout: |a - n| / max(|a|, |n|, floor). Central
/// differences at step 1e-5 resolve an O(1) loss only to ~1e-10, so the floor
/// keeps near-zero gradients from measuring roundoff.
double relative_error(double analytic, double numeric, double floor = 1e-5);

/// Central finite differences of `loss` w.r.t. every entry of `params`
/// (perturbed in place and restored), compared with `analytic`.
GradCheckResult check_gradients(std::span<double> params, std::span<const double> analytic,
                                const std::function<double()>& loss, double step = 1e-5);

}  // namespace drl::nn
