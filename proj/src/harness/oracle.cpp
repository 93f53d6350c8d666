#include "drl/harness/oracle.hpp"

#include <cmath>

#include "drl/core/version.hpp"
#include "drl/tabular/mdp.hpp"

namespace drl::harness {

nlohmann::json run_oracle(const ExperimentConfig& cfg) {
  const auto& c = cfg.source;
  const double gamma = c.get_real("oracle.gamma");
  const auto delays = c.get_int_list("oracle.delays");
  const int w = static_cast<int>(c.get_int("oracle.grid_width"));
  const int h = static_cast<int>(c.get_int("oracle.grid_height"));

  nlohmann::json report;
  report["config_hash"] = cfg.config_hash;
  report["code_version"] = std::string(kCodeVersion);
  bool all = true;

  const auto check = [&](const std::string& name, const tabular::TabularMDP& mdp, int d) {
    const auto cmp = tabular::compare_mbs(mdp, d);
    auto j = tabular::to_json(cmp, cmp.augmented_states <= 64);
    j["mdp"] = name;
    j["pass"] = cmp.policy_mismatches == 0 && cmp.max_value_gap <= kOracleValueTolerance;
    all = all && j["pass"].get<bool>();
    report["deterministic"].push_back(j);
  };
  for (auto n : c.get_int_list("oracle.chain_sizes")) {
    const auto mdp = tabular::chain_mdp(static_cast<int>(n), gamma);
    for (auto d : delays) check("chain_n" + std::to_string(n), mdp, static_cast<int>(d));
  }
  const auto grid = tabular::gridworld_mdp(w, h, 0.0, gamma);
  for (auto d : delays) check("gridworld_" + std::to_string(w) + "x" + std::to_string(h), grid, static_cast<int>(d));

  const double slip = c.get_real("oracle.stochastic_slip");
  const int sd = static_cast<int>(c.get_int("oracle.stochastic_delay"));
  const double sgamma = c.get_real("oracle.stochastic_gamma");
  const auto noisy = tabular::gridworld_mdp(w, h, slip, sgamma);
  const auto cmp = tabular::compare_mbs(noisy, sd);
  auto j = tabular::to_json(cmp, false);
  const double gap = std::abs(cmp.start_value_optimal - cmp.start_value_mbs) / std::abs(cmp.start_value_optimal);
  j["mdp"] = "gridworld_slip";
  j["slip"] = slip;
  j["gamma"] = sgamma;
  j["start_relative_gap"] = gap;
  j["pass"] = gap <= kStochasticGapTolerance;
  all = all && j["pass"].get<bool>();
  report["stochastic"] = j;
  report["pass"] = all;
  return report;
}

}  // namespace drl::harness
