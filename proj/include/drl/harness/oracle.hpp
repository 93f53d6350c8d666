#pragma once

#include <nlohmann/json.hpp>

#include "drl/harness/experiment.hpp"

namespace drl::harness {

inline constexpr double kOracleValueTolerance = 1e-9;
inline constexpr double kStochasticGapTolerance = 0.05;

/// MBS against augmented-state value iteration on the deterministic chains
/// and gridworld of the [oracle] section, plus the mildly stochastic
/// gridworld check. Sets "pass" in the returned report.
nlohmann::json run_oracle(const ExperimentConfig& cfg);

}  // namespace drl::harness
