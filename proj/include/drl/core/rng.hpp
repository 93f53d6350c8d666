#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>

namespace drl {

/// Deterministic random stream identified by (seed, stream id).
///
/// Backed by std::mt19937_64, whose output sequence is fixed by the standard.
/// The distributions are computed here rather than with <random>'s
/// distribution classes because those are implementation-defined and would
/// break cross-platform reproducibility.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  int uniform_int(int n);
  /// Standard normal via Box-Muller.
  double normal();
  /// Samples an index from a probability vector.
  int categorical(std::span<const double> probs);

  /// Independent child stream, reproducible from this stream's identity.
  RngStream derive(std::uint64_t child) const;

  std::string save_state() const;
  void load_state(const std::string& text);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace drl
