// Acceptance runs. `acceptance --criterion N` runs one check, no argument runs
// all of them; each prints a single PASS/FAIL line and the exit code is the
// number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "drl/agents/learner.hpp"
#include "drl/agents/returns.hpp"
#include "drl/envs/delay.hpp"
#include "drl/harness/config.hpp"
#include "drl/harness/experiment.hpp"
#include "drl/harness/gradsuite.hpp"
#include "drl/harness/model_fit.hpp"
#include "drl/harness/oracle.hpp"
#include "drl/harness/selfplay.hpp"
#include "drl/harness/stats.hpp"
#include "drl/harness/train.hpp"

namespace fs = std::filesystem;
using namespace drl;
using namespace drl::harness;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

const fs::path kConfigs = DRL_CONFIG_DIR;

fs::path workdir(const std::string& name) {
  const auto p = fs::current_path() / "acceptance_runs" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ExperimentConfig experiment(const std::string& file, const fs::path& out,
                            const std::vector<std::string>& overrides = {}) {
  Config c = Config::load(kConfigs / file);
  for (const auto& o : overrides) c.apply_override(o);
  c.set("run.out", out.string(), "acceptance");
  return make_experiment(c);
}

std::string num(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

std::string interval(const Interval& i) { return "[" + num(i.lo) + ", " + num(i.hi) + "]"; }

Outcome gradient_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto results = run_gradient_suites(10);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool ok = secs < 120.0;
  double worst = 0.0;
  std::string worst_name;
  for (const auto& r : results) {
    std::cout << "  " << r.name << " params=" << r.params << " max_rel_error=" << num(r.max_rel_error, 3) << "\n";
    ok = ok && r.max_rel_error < 1e-4;
    if (r.max_rel_error >= worst) {
      worst = r.max_rel_error;
      worst_name = r.name;
    }
  }
  return {ok, std::to_string(results.size()) + " suites x 10 seeds, worst " + worst_name + " " + num(worst, 3) +
                  ", " + num(secs, 3) + " s"};
}

Outcome oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto report = run_oracle(make_experiment(Config{}));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  int cases = 0, passed = 0;
  double gap = 0.0;
  for (const auto& j : report.at("deterministic")) {
    ++cases;
    if (j.at("pass").get<bool>()) ++passed;
    gap = std::max(gap, j.at("max_value_gap").get<double>());
  }
  return {cases == 12 && passed == cases && secs < 60.0,
          std::to_string(passed) + "/" + std::to_string(cases) + " MDP x delay cases identical, max value gap " +
              num(gap, 3) + ", " + num(secs, 3) + " s"};
}

Outcome model_undoing() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = fit_chain_predictor(ChainFitConfig{});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {r.accuracy_ok() && r.rmse_ok() && r.rollout_ok() && secs < 600.0,
          "one-step accuracy " + num(r.one_step_accuracy) + ", rmse " + num(r.one_step_rmse, 3) + ", (3,3) rollouts " +
              std::to_string(r.rollout_exact) + "/" + std::to_string(r.rollout_cases) + " exact after " +
              std::to_string(r.iterations) + " iterations, " + num(secs, 3) + " s"};
}

Outcome delay_degrades() {
  const auto dir = workdir("delay");
  const auto x = experiment("acceptance_delay.cfg", dir);
  const auto runs = sweep(x, "d=0,2,4");
  std::map<int, std::vector<double>> finals;
  for (const auto& r : runs) finals[std::stoi(r.label.substr(1))].push_back(r.final_return);
  std::map<int, MeanEstimate> est;
  std::string detail;
  for (auto& [d, v] : finals) {
    est[d] = mean_interval(v);
    detail += "d=" + std::to_string(d) + " " + num(est[d].mean) + " " + interval(est[d].ci) + "; ";
  }
  const bool have = est.size() == 3 && finals[0].size() == 5 && finals[2].size() == 5 && finals[4].size() == 5;
  const bool ok = have && est[0].mean > est[2].mean && est[2].mean > est[4].mean && !est[0].ci.overlaps(est[4].ci);
  return {ok, detail + std::to_string(x.steps) + " steps per run"};
}

Outcome prediction_restores() {
  const auto dir = workdir("selfplay");
  const auto x = experiment("acceptance_selfplay.cfg", dir);
  const auto sp = selfplay_train(x);
  std::map<std::string, fs::path> by_cfg;
  for (std::size_t i = 0; i < sp.ids.size(); ++i) {
    by_cfg[std::to_string(x.population[i].d) + ":" + std::to_string(x.population[i].p)] = sp.checkpoints[i];
  }
  if (!by_cfg.count("4:4") || !by_cfg.count("4:2") || !by_cfg.count("4:0")) return {false, "population lacks 4:0, 4:2, 4:4"};
  bool ok = true;
  std::string detail;
  for (const std::string b : {"4:0", "4:2"}) {
    const auto m = head_to_head(x, by_cfg["4:4"], by_cfg[b], x.match.episodes, x.seed + 1000);
    ok = ok && m.win_rate_a > 0.55 && m.ci.lo > 0.5;
    detail += "(4,4) vs (" + b.substr(0, 1) + "," + b.substr(2) + ") " + num(m.win_rate_a) + " " + interval(m.ci) +
              " W/L/D " + std::to_string(m.wins_a) + "/" + std::to_string(m.wins_b) + "/" + std::to_string(m.draws) +
              "; ";
  }
  return {ok, detail + std::to_string(x.match.episodes) + " episodes each"};
}

Outcome return_alignment() {
  RngStream rng(2024, 6);
  const StateSchema schema = tiny_schema();
  int identical = 0;
  for (int k = 0; k < 100; ++k) {
    agents::AgentConfig c;
    c.d = 1 + rng.uniform_int(4);
    c.p = rng.uniform_int(c.d + 1);
    c.unroll = c.d + 2 + rng.uniform_int(8);
    c.hidden = 8;
    c.layers = 1;
    c.predictor = {6, 6};
    const agents::AgentNets nets(schema, 3, c);
    const auto params = nets.init_params(rng);
    auto tr = random_trajectory(schema, 3, c.d, c.unroll, rng);
    tr.terminal = rng.uniform() < 0.3;
    nn::Vec h = agents::initial_hidden(nets);
    for (auto& st : tr.steps) {
      st.hidden = h;
      if (nets.model() != nullptr) h = nets.model()->advance_hidden(params, st.state, h);
    }
    const auto s = static_cast<std::size_t>(rng.uniform_int(static_cast<int>(tr.size()) - c.d));
    auto zeroed = tr;
    for (std::size_t i = s; i < s + static_cast<std::size_t>(c.d); ++i) zeroed.steps[i].reward = 0.0;
    if (agents::decision_policy_gradient(nets, params, tr, s) == agents::decision_policy_gradient(nets, params, zeroed, s))
      ++identical;
  }
  return {identical == 100, std::to_string(identical) + "/100 policy gradients bit-identical"};
}

Outcome vtrace_collapse() {
  RngStream rng(2024, 7);
  int within = 0;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int n = 1 + rng.uniform_int(30);
    const double gamma = rng.uniform(0.0, 0.999);
    std::vector<double> r, V, logp;
    for (int i = 0; i < n; ++i) {
      r.push_back(rng.normal());
      V.push_back(rng.normal());
      logp.push_back(std::log(rng.uniform(0.05, 1.0)));
    }
    const double boot = rng.normal();
    const auto res = agents::vtrace_targets(logp, logp, V, boot, r, gamma, 1.0, 1.0);
    double err = 0.0;
    for (int s = 0; s < n; ++s) {
      double g = boot;
      for (int t = n - 1; t >= s; --t) g = r[static_cast<std::size_t>(t)] + gamma * g;
      err = std::max(err, std::abs(res.vs[static_cast<std::size_t>(s)] - g));
    }
    worst = std::max(worst, err);
    if (err <= 1e-12) ++within;
  }
  return {within == 100, std::to_string(within) + "/100 instances within 1e-12, max error " + num(worst, 3)};
}

Outcome reaction_times() {
  struct Case {
    int d, f;
    long ms;
  };
  const Case cases[] = {{5, 4, 333}, {1, 3, 50}, {15, 1, 250}};
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto rt = envs::reaction_time_ms(c.d, c.f);
    const long got = std::lround(rt.milliseconds);
    ok = ok && got == c.ms;
    detail += "(" + std::to_string(c.d) + ",." + "," + std::to_string(c.f) + ") " + std::to_string(got) + " ms; ";
  }
  return {ok, detail};
}

Outcome determinism() {
  bool ok = true;
  std::string detail;
  for (const std::string env : {"chain", "gridworld", "mountaincar", "minimelee"}) {
    const auto dir = workdir("determinism_" + env);
    const auto x = experiment(env + ".cfg", dir, {"run.steps=3000", "run.eval_every=1500", "run.eval_episodes=3"});
    const auto same = determinism_check(x, 7, 7);
    const auto other = determinism_check(x, 7, 8);
    const bool pass = same.status == DeterminismReport::Status::pass &&
                      other.status == DeterminismReport::Status::fail;
    ok = ok && pass;
    detail += env + (pass ? " identical" : " " + same.message) + "; ";
  }
  return {ok, detail + "different seeds diverge"};
}

const std::map<int, std::pair<std::string, std::function<Outcome()>>> kCriteria = {
    {1, {"gradient suite", gradient_suite}},
    {2, {"oracle equivalence", oracle_equivalence}},
    {3, {"perfect-model undoing", model_undoing}},
    {4, {"delay degrades performance", delay_degrades}},
    {5, {"prediction restores performance", prediction_restores}},
    {6, {"return alignment", return_alignment}},
    {7, {"v-trace collapse", vtrace_collapse}},
    {8, {"reaction-time arithmetic", reaction_times}},
    {9, {"determinism", determinism}},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      which.push_back(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--criterion N]...\n";
      return 64;
    }
  }
  if (which.empty())
    for (const auto& [n, c] : kCriteria) which.push_back(n);
  int failures = 0;
  for (int n : which) {
    const auto it = kCriteria.find(n);
    if (it == kCriteria.end()) {
      std::cerr << "unknown criterion " << n << "\n";
      return 64;
    }
    Outcome o;
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (o.detail.ends_with("; ")) o.detail.resize(o.detail.size() - 2);
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << " (" << it->second.first << "): " << o.detail
              << std::endl;
    if (!o.pass) ++failures;
  }
  return failures;
}
