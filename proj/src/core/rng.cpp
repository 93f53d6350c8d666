#include "drl/core/rng.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "drl/core/errors.hpp"

namespace drl {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

int RngStream::uniform_int(int n) {
  require(n > 0, "uniform_int: n must be positive");
  const std::uint64_t range = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<int>(x % range);
}

double RngStream::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int RngStream::categorical(std::span<const double> probs) {
  require(!probs.empty(), "categorical: empty distribution");
  const double u = uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  // Rounding left a sliver above the cumulative sum; take the last nonzero entry.
  for (std::size_t i = probs.size(); i-- > 0;) {
    if (probs[i] > 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

RngStream RngStream::derive(std::uint64_t child) const {
  return RngStream(splitmix64(seed_ ^ splitmix64(stream_)), child);
}

std::string RngStream::save_state() const {
  std::ostringstream os;
  os << seed_ << ' ' << stream_ << ' ' << engine_;
  return os.str();
}

void RngStream::load_state(const std::string& text) {
  std::istringstream is(text);
  std::uint64_t seed = 0, stream = 0;
  std::mt19937_64 engine;
  is >> seed >> stream >> engine;
  if (!is) throw UsageError("rng: malformed saved state");
  seed_ = seed;
  stream_ = stream;
  engine_ = engine;
}

}  // namespace drl
