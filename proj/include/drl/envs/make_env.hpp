#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>

#include "drl/envs/environment.hpp"

namespace drl::envs {

/// Numeric environment parameters keyed by name (e.g. "n", "slip").
using EnvParams = std::map<std::string, double>;

using AnyEnv = std::variant<std::unique_ptr<Environment>, std::unique_ptr<TwoPlayerEnv>>;

/// Builds one of: chain {n, max_steps}, gridworld {width, height, slip,
/// max_steps}, mountaincar {max_steps}, minimelee {max_steps}. Unknown
/// names or parameter keys raise UsageError.
AnyEnv make_env(const std::string& name, const EnvParams& params, const RngStream& rng);

/// Convenience wrappers that also check the environment kind.
std::unique_ptr<Environment> make_single_env(const std::string& name, const EnvParams& params,
                                             const RngStream& rng);
std::unique_ptr<TwoPlayerEnv> make_two_player_env(const std::string& name, const EnvParams& params,
                                                  const RngStream& rng);

}  // namespace drl::envs
