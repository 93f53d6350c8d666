#include "drl/harness/stats.hpp"

#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "drl/core/errors.hpp"

namespace drl::harness {

Interval wilson_interval(double successes, double n, double confidence) {
  require(n > 0.0, "wilson_interval: need at least one trial");
  require(successes >= 0.0 && successes <= n, "wilson_interval: successes out of range");
  const double z = boost::math::quantile(boost::math::normal(), 0.5 + confidence / 2.0);
  const double phat = successes / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (phat + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

MeanEstimate mean_interval(std::span<const double> values, double confidence) {
  require(!values.empty(), "mean_interval: no values");
  MeanEstimate m;
  m.n = values.size();
  m.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(m.n);
  if (m.n < 2) {
    m.ci = {m.mean, m.mean};
    return m;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - m.mean) * (v - m.mean);
  m.stddev = std::sqrt(ss / static_cast<double>(m.n - 1));
  const double t =
      boost::math::quantile(boost::math::students_t(static_cast<double>(m.n - 1)), 0.5 + confidence / 2.0);
  const double half = t * m.stddev / std::sqrt(static_cast<double>(m.n));
  m.ci = {m.mean - half, m.mean + half};
  return m;
}

}  // namespace drl::harness
