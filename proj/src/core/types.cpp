#include "drl/core/types.hpp"

#include <cmath>
#include <string>

#include "drl/core/errors.hpp"

namespace drl {

int StateSchema::encoded_size() const {
  int n = n_continuous;
  for (int c : categorical_cards) n += c;
  return n;
}

void StateSchema::validate() const {
  require(n_continuous >= 0, "schema: negative continuous count");
  for (int c : categorical_cards) {
    require(c >= 2, "schema: categorical cardinality must be >= 2, got " + std::to_string(c));
  }
}

void check_conforms(const MixedState& state, const StateSchema& schema) {
  require(static_cast<int>(state.continuous.size()) == schema.n_continuous,
          "state: continuous length " + std::to_string(state.continuous.size()) +
              " does not match schema (" + std::to_string(schema.n_continuous) + ")");
  require(state.categorical.size() == schema.categorical_cards.size(),
          "state: categorical slot count does not match schema");
  for (double x : state.continuous) require(std::isfinite(x), "state: non-finite continuous feature");
  for (std::size_t i = 0; i < state.categorical.size(); ++i) {
    const auto& c = state.categorical[i];
    require(c.cardinality == schema.categorical_cards[i],
            "state: slot " + std::to_string(i) + " cardinality mismatch");
    require(c.index >= 0 && c.index < c.cardinality,
            "state: slot " + std::to_string(i) + " index out of range");
  }
}

void check_conforms(const StateDistribution& dist, const StateSchema& schema) {
  require(static_cast<int>(dist.continuous_mean.size()) == schema.n_continuous,
          "distribution: continuous length does not match schema");
  require(dist.categorical_logits.size() == schema.categorical_cards.size(),
          "distribution: categorical slot count does not match schema");
  for (double x : dist.continuous_mean) require(std::isfinite(x), "distribution: non-finite mean");
  for (std::size_t i = 0; i < dist.categorical_logits.size(); ++i) {
    const auto& logits = dist.categorical_logits[i];
    require(static_cast<int>(logits.size()) == schema.categorical_cards[i],
            "distribution: slot " + std::to_string(i) + " logit count mismatch");
    for (double l : logits) require(std::isfinite(l), "distribution: non-finite logit");
  }
}

std::vector<double> encode(const MixedState& state, const StateSchema& schema) {
  check_conforms(state, schema);
  std::vector<double> out;
  out.reserve(schema.encoded_size());
  out.insert(out.end(), state.continuous.begin(), state.continuous.end());
  for (const auto& c : state.categorical) {
    for (int k = 0; k < c.cardinality; ++k) out.push_back(k == c.index ? 1.0 : 0.0);
  }
  return out;
}

int argmax(std::span<const double> values) {
  require(!values.empty(), "argmax of empty range");
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

MixedState decode_hard(const StateDistribution& dist, const StateSchema& schema) {
  check_conforms(dist, schema);
  MixedState s;
  s.continuous = dist.continuous_mean;
  for (std::size_t i = 0; i < dist.categorical_logits.size(); ++i) {
    s.categorical.push_back({schema.categorical_cards[i], argmax(dist.categorical_logits[i])});
  }
  return s;
}

StateDistribution lift(const MixedState& state, const StateSchema& schema) {
  check_conforms(state, schema);
  StateDistribution d;
  d.continuous_mean = state.continuous;
  for (const auto& c : state.categorical) {
    std::vector<double> logits(c.cardinality, -kLiftLogit);
    logits[c.index] = kLiftLogit;
    d.categorical_logits.push_back(std::move(logits));
  }
  return d;
}

std::vector<double> flatten(const StateDistribution& dist) {
  std::vector<double> out(dist.continuous_mean);
  for (const auto& l : dist.categorical_logits) out.insert(out.end(), l.begin(), l.end());
  return out;
}

StateDistribution unflatten(std::span<const double> flat, const StateSchema& schema) {
  require(static_cast<int>(flat.size()) == schema.dist_size(), "unflatten: size mismatch");
  StateDistribution d;
  auto it = flat.begin();
  d.continuous_mean.assign(it, it + schema.n_continuous);
  it += schema.n_continuous;
  for (int card : schema.categorical_cards) {
    d.categorical_logits.emplace_back(it, it + card);
    it += card;
  }
  return d;
}

}  // namespace drl
