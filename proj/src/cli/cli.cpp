#include "drl/cli/cli.hpp"

#include <CLI11.hpp>
#include <iomanip>
#include <iostream>

#include "drl/core/errors.hpp"
#include "drl/harness/gradsuite.hpp"
#include "drl/harness/oracle.hpp"
#include "drl/harness/selfplay.hpp"
#include "drl/harness/train.hpp"

namespace drl::cli {

namespace {

struct Options {
  std::string config;
  std::string out;
  std::vector<std::string> sets;
  std::vector<std::string> grid;
  std::string a, b;
  int episodes = -1;
  int seeds = -1;
  std::int64_t seed_b = -1;
};

harness::ExperimentConfig load(const Options& o, bool need_config, std::ostream& err) {
  if (need_config && o.config.empty()) throw UsageError("--config is required for this command");
  harness::Config cfg = o.config.empty() ? harness::Config() : harness::Config::load(o.config);
  if (cfg.apply_environment()) err << "note: " << cfg.notes().back() << "\n";
  for (const auto& s : o.sets) cfg.apply_override(s);
  if (!o.out.empty()) cfg.set("run.out", o.out, "--out");
  return harness::make_experiment(cfg);
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cfg = load(o, true, err);
  const auto res = harness::train(cfg);
  out << "trained " << res.steps << " steps, " << res.updates << " updates -> " << res.dir.string() << "\n";
  if (!res.evals.empty()) {
    const auto& e = res.evals.back();
    out << "final eval: mean_return " << e.mean_return << " [" << e.ci.lo << ", " << e.ci.hi << "], greedy "
        << e.greedy_mean_return << "\n";
  }
  return kExitOk;
}

int cmd_selfplay(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cfg = load(o, true, err);
  const auto res = harness::selfplay_train(cfg);
  for (std::size_t i = 0; i < res.ids.size(); ++i) {
    out << res.ids[i] << ": " << res.steps[i] << " steps, recent mean return " << res.mean_return[i] << " -> "
        << res.checkpoints[i].string() << "\n";
  }
  return kExitOk;
}

int cmd_match(const Options& o, std::ostream& out, std::ostream& err) {
  auto cfg = load(o, true, err);
  const std::string a = o.a.empty() ? cfg.match.a : o.a;
  const std::string b = o.b.empty() ? cfg.match.b : o.b;
  if (a.empty() || b.empty()) throw UsageError("match needs two checkpoints: set match.a and match.b (or --a/--b)");
  const int episodes = o.episodes >= 0 ? o.episodes : cfg.match.episodes;
  const auto res = harness::head_to_head(cfg, a, b, episodes, cfg.seed);
  const auto j = harness::to_json(res);
  std::filesystem::create_directories(cfg.out);
  harness::write_text(cfg.out / "match.json", j.dump(2) + "\n");
  out << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cfg = load(o, true, err);
  std::string grid;
  for (const auto& g : o.grid) grid += (grid.empty() ? "" : ";") + g;
  if (grid.empty()) grid = cfg.grid;
  if (grid.empty()) throw UsageError("sweep needs --grid or sweep.grid");
  const auto runs = harness::sweep(cfg, grid);
  for (const auto& r : runs) out << r.label << " seed " << r.seed << ": final " << r.final_return << " -> "
                                 << r.dir.string() << "\n";
  return kExitOk;
}

int cmd_oracle(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cfg = load(o, false, err);
  const auto report = harness::run_oracle(cfg);
  std::filesystem::create_directories(cfg.out);
  const auto path = cfg.out / "oracle.json";
  harness::write_text(path, report.dump(2) + "\n");
  for (const auto& j : report["deterministic"]) {
    out << j["mdp"].get<std::string>() << " d=" << j["d"] << ": mismatches " << j["policy_mismatches"]
        << ", max value gap " << j["max_value_gap"] << (j["pass"].get<bool>() ? "  ok" : "  FAIL") << "\n";
  }
  const auto& s = report["stochastic"];
  out << "gridworld slip " << s["slip"] << " d=" << s["d"] << ": start-value gap " << s["start_relative_gap"]
      << (s["pass"].get<bool>() ? "  ok" : "  FAIL") << "\n";
  out << "report: " << path.string() << "\n";
  return report["pass"].get<bool>() ? kExitOk : kExitRuntime;
}

int cmd_gradcheck(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cfg = load(o, false, err);
  const int seeds = o.seeds > 0 ? o.seeds : static_cast<int>(cfg.source.get_int("gradcheck.seeds"));
  bool ok = true;
  for (const auto& r : harness::run_gradient_suites(seeds)) {
    out << std::left << std::setw(26) << r.name << " params " << std::setw(5) << r.params << " max rel error "
        << std::scientific << std::setprecision(3) << r.max_rel_error << std::defaultfloat
        << (r.pass() ? "  ok" : "  FAIL") << "\n";
    ok = ok && r.pass();
  }
  return ok ? kExitOk : kExitRuntime;
}

int cmd_determinism(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cfg = load(o, true, err);
  const std::uint64_t seed_b = o.seed_b >= 0 ? static_cast<std::uint64_t>(o.seed_b) : cfg.seed;
  const auto rep = harness::determinism_check(cfg, cfg.seed, seed_b);
  using S = harness::DeterminismReport::Status;
  out << (rep.status == S::pass ? "pass: " : rep.status == S::fail ? "FAIL: " : "") << rep.message << "\n";
  return rep.status == S::fail ? kExitRuntime : kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Delayed-action reinforcement learning experiments", "drl"};
  app.require_subcommand(1);
  Options o;
  const auto common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", o.config, "experiment config file");
    if (config_required) opt->required();
    sub->add_option("--out", o.out, "output directory (overrides run.out)");
    sub->add_option("--set", o.sets, "override, section.key=value (repeatable)");
  };
  auto* train = app.add_subcommand("train", "train one agent");
  common(train, true);
  auto* selfplay = app.add_subcommand("selfplay", "round-robin self-play of a population");
  common(selfplay, true);
  auto* match = app.add_subcommand("match", "head-to-head match between two checkpoints");
  common(match, true);
  match->add_option("--a", o.a, "checkpoint of agent A");
  match->add_option("--b", o.b, "checkpoint of agent B");
  match->add_option("--episodes", o.episodes, "episodes");
  auto* sweep = app.add_subcommand("sweep", "train every point of a (d, p, f) grid");
  common(sweep, true);
  sweep->add_option("--grid", o.grid, "grid, e.g. d=0,1,2,4,5 (repeatable)");
  auto* oracle = app.add_subcommand("oracle", "tabular MBS vs augmented value iteration");
  common(oracle, false);
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient suites");
  common(gradcheck, false);
  gradcheck->add_option("--seeds", o.seeds, "seeds per suite");
  auto* determinism = app.add_subcommand("determinism", "two equal-seed runs must log identical metrics");
  common(determinism, true);
  determinism->add_option("--seed-b", o.seed_b, "seed of the second run (default: same seed)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*train) return cmd_train(o, out, err);
    if (*selfplay) return cmd_selfplay(o, out, err);
    if (*match) return cmd_match(o, out, err);
    if (*sweep) return cmd_sweep(o, out, err);
    if (*oracle) return cmd_oracle(o, out, err);
    if (*gradcheck) return cmd_gradcheck(o, out, err);
    if (*determinism) return cmd_determinism(o, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const TrainingError& e) {
    err << "training failure: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace drl::cli
