#include "drl/envs/make_env.hpp"

#include <set>

#include "drl/core/errors.hpp"
#include "drl/envs/minimelee.hpp"
#include "drl/envs/worlds.hpp"

namespace drl::envs {
namespace {

void check_keys(const std::string& env, const EnvParams& params, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : params) {
    if (!allowed.contains(key)) throw UsageError("env." + key + ": unknown parameter for '" + env + "'");
  }
}

double get(const EnvParams& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

int get_int(const EnvParams& params, const std::string& key, int fallback) {
  const double v = get(params, key, fallback);
  if (v != static_cast<double>(static_cast<int>(v))) throw UsageError("env." + key + ": expected an integer");
  return static_cast<int>(v);
}

}  // namespace

AnyEnv make_env(const std::string& name, const EnvParams& params, const RngStream& rng) {
  try {
    if (name == "chain") {
      check_keys(name, params, {"n", "max_steps"});
      return std::make_unique<ChainWorld>(get_int(params, "n", 5), get_int(params, "max_steps", 100));
    }
    if (name == "gridworld") {
      check_keys(name, params, {"width", "height", "slip", "max_steps"});
      return std::make_unique<GridWorld>(get_int(params, "width", 4), get_int(params, "height", 4),
                                         get(params, "slip", 0.0), get_int(params, "max_steps", 100),
                                         rng);
    }
    if (name == "mountaincar") {
      check_keys(name, params, {"max_steps"});
      return std::make_unique<MountainCar>(get_int(params, "max_steps", 200));
    }
    if (name == "minimelee") {
      check_keys(name, params, {"max_steps"});
      MeleeRules rules;
      rules.max_steps = get_int(params, "max_steps", rules.max_steps);
      return std::make_unique<MiniMelee>(rules);
    }
  } catch (const ContractViolation& e) {
    throw UsageError(std::string("env: ") + e.what());
  }
  throw UsageError("env.name: unknown environment '" + name + "'");
}

std::unique_ptr<Environment> make_single_env(const std::string& name, const EnvParams& params,
                                             const RngStream& rng) {
  auto env = make_env(name, params, rng);
  if (auto* single = std::get_if<std::unique_ptr<Environment>>(&env)) return std::move(*single);
  throw UsageError("env.name: '" + name + "' is a two-player environment");
}

std::unique_ptr<TwoPlayerEnv> make_two_player_env(const std::string& name, const EnvParams& params,
                                                  const RngStream& rng) {
  auto env = make_env(name, params, rng);
  if (auto* two = std::get_if<std::unique_ptr<TwoPlayerEnv>>(&env)) return std::move(*two);
  throw UsageError("env.name: '" + name + "' is a single-agent environment");
}

}  // namespace drl::envs
