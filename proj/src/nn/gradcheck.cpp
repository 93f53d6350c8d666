#include "drl/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "drl/core/errors.hpp"

namespace drl::nn {

double relative_error(double analytic, double numeric, double floor) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

GradCheckResult check_gradients(std::span<double> params, std::span<const double> analytic,
                                const std::function<double()>& loss, double step) {
  require(params.size() == analytic.size(), "gradcheck: gradient/parameter size mismatch");
  GradCheckResult result;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + step;
    const double up = loss();
    params[i] = saved - step;
    const double down = loss();
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double err = relative_error(analytic[i], numeric);
    if (err > result.max_rel_error || result.n_checked == 0) {
      result.max_rel_error = err;
      result.worst_index = i;
      result.worst_analytic = analytic[i];
      result.worst_numeric = numeric;
    }
    ++result.n_checked;
  }
  return result;
}

}  // namespace drl::nn
