#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace drl {

/// Layout of an environment's observation: a block of real features followed
/// by zero or more categorical slots.
struct StateSchema {
  int n_continuous = 0;
  std::vector<int> categorical_cards;

  /// Length of encode() output: n_continuous + sum of cardinalities.
  int encoded_size() const;
  /// Length of a flattened StateDistribution (identical to encoded_size).
  int dist_size() const { return encoded_size(); }
  void validate() const;

  bool operator==(const StateSchema&) const = default;
};

struct Categorical {
  int cardinality = 2;
  int index = 0;

  bool operator==(const Categorical&) const = default;
};

struct MixedState {
  std::vector<double> continuous;
  std::vector<Categorical> categorical;

  bool operator==(const MixedState&) const = default;
};

struct Action {
  int index = 0;

  auto operator<=>(const Action&) const = default;
};

/// Every environment reserves action 0 for its "do nothing" choice; delay
/// queues start full of it.
inline constexpr Action kNoop{0};

/// Predicted state: continuous means and per-slot categorical logits.
struct StateDistribution {
  std::vector<double> continuous_mean;
  std::vector<std::vector<double>> categorical_logits;

  bool operator==(const StateDistribution&) const = default;
};

/// Logit magnitude used by lift() for the degenerate distribution.
inline constexpr double kLiftLogit = 10.0;

void check_conforms(const MixedState& state, const StateSchema& schema);
void check_conforms(const StateDistribution& dist, const StateSchema& schema);

/// Raw continuous features followed by one one-hot block per categorical slot.
std::vector<double> encode(const MixedState& state, const StateSchema& schema);

/// Collapses a distribution to a concrete state: continuous copied, each slot
/// takes the argmax of its logits (ties go to the lowest index).
MixedState decode_hard(const StateDistribution& dist, const StateSchema& schema);

/// Embeds a concrete state as a near-degenerate distribution (+L on the true
/// class, -L elsewhere).
StateDistribution lift(const MixedState& state, const StateSchema& schema);

/// Flat layout shared with the predictor: continuous means, then each slot's
/// logits in order.
std::vector<double> flatten(const StateDistribution& dist);
StateDistribution unflatten(std::span<const double> flat, const StateSchema& schema);

/// Index of the largest element, lowest index on ties.
int argmax(std::span<const double> values);

}  // namespace drl
