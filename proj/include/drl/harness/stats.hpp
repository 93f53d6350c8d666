#pragma once

#include <span>

namespace drl::harness {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

/// Wilson score interval for a proportion. `successes` may be fractional
/// (draws counted as half a win).
Interval wilson_interval(double successes, double n, double confidence = 0.95);

struct MeanEstimate {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  Interval ci;          // Student-t interval for the mean
  std::size_t n = 0;
};

MeanEstimate mean_interval(std::span<const double> values, double confidence = 0.95);

}  // namespace drl::harness
