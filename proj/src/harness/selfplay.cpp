#include "drl/harness/selfplay.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>

#include "drl/core/errors.hpp"
#include "drl/core/version.hpp"
#include "drl/envs/delay.hpp"
#include "drl/envs/minimelee.hpp"
#include "drl/harness/actor.hpp"
#include "drl/harness/scripted.hpp"

namespace drl::harness {

namespace {

struct Outcome {
  std::array<double, 2> ret{};
  std::array<int, 2> ko{};  // knockouts scored by each side
  std::int64_t steps = 0;
};

using Sink = std::function<void(int, agents::Trajectory&&)>;

Outcome play_episode(const ExperimentConfig& cfg, std::array<const agents::AgentNets*, 2> nets,
                     std::array<nn::ConstParams, 2> params, std::array<Seat*, 2> seats, RngStream env_rng,
                     bool greedy, const Sink& sink) {
  envs::DelayedTwoPlayerEnv env(envs::make_two_player_env(cfg.env_name, cfg.env_params, env_rng),
                                nets[0]->config().d, nets[1]->config().d, nets[0]->config().f);
  env.reset(env_rng);
  for (int k = 0; k < 2; ++k) seats[k]->begin(*nets[k], env.observe(k), env.queue(k));
  Outcome out;
  for (;;) {
    const Action a0 = seats[0]->choose(*nets[0], params[0], greedy);
    const Action a1 = seats[1]->choose(*nets[1], params[1], greedy);
    const auto r = env.step(a0, a1);
    ++out.steps;
    for (int k = 0; k < 2; ++k) {
      auto tr = seats[k]->observe(k == 0 ? r.executed_a : r.executed_b, k == 0 ? r.reward_a : r.reward_b,
                                  env.observe(k), env.queue(k), r.terminal);
      if (tr && sink) sink(k, std::move(*tr));
    }
    if (r.terminal) break;
  }
  for (int k = 0; k < 2; ++k) out.ret[k] = seats[k]->episode_return;
  if (const auto* melee = dynamic_cast<const envs::MiniMelee*>(&env.inner())) {
    out.ko[0] = melee->kos(1);
    out.ko[1] = melee->kos(0);
  }
  return out;
}

// The member plays player 0 against the scripted opponent.
Outcome play_scripted(const ExperimentConfig& cfg, const agents::AgentNets& nets, nn::ConstParams params, Seat& seat,
                      RngStream env_rng, const std::function<void(agents::Trajectory&&)>& sink) {
  auto game = envs::make_two_player_env(cfg.env_name, cfg.env_params, env_rng);
  envs::DelayedEnv env(std::make_unique<ScriptedVersusEnv>(
                           std::move(game), ScriptedOpponent(cfg.opponent, env_rng.derive(streams::kOpponent))),
                       nets.config().d, nets.config().f);
  seat.begin(nets, env.reset(env_rng), env.queue());
  Outcome out;
  for (;;) {
    const auto r = env.step(seat.choose(nets, params, false));
    ++out.steps;
    auto tr = seat.observe(r.executed, r.reward, r.state, r.queue, r.terminal);
    if (tr) sink(std::move(*tr));
    if (r.terminal) break;
  }
  out.ret[0] = seat.episode_return;
  return out;
}

void require_two_player(const ExperimentConfig& cfg, const std::string& what) {
  if (!cfg.two_player()) {
    throw UsageError(what + " needs a two-player game: set env.name = minimelee (got '" + cfg.env_name + "')");
  }
}

}  // namespace

std::string member_id(std::size_t index, const agents::AgentConfig& c) {
  return "a" + std::to_string(index) + "_d" + std::to_string(c.d) + "p" + std::to_string(c.p);
}

SelfPlayResult selfplay_train(const ExperimentConfig& cfg) {
  require_two_player(cfg, "selfplay");
  const std::size_t n = cfg.population.size();
  if (n < 2) {
    throw UsageError("config key 'population.members': self-play needs at least 2 members, got " +
                     std::to_string(n));
  }
  std::filesystem::create_directories(cfg.out);
  write_text(cfg.out / "config.cfg", config_echo(cfg));
  const RunStamp stamp = make_stamp(cfg.config_hash, cfg.seed);

  const auto probe = envs::make_two_player_env(cfg.env_name, cfg.env_params, RngStream(cfg.seed, streams::kEnv));
  std::vector<std::unique_ptr<AgentState>> agents_;
  std::vector<std::unique_ptr<Seat>> seats;
  std::vector<CsvLog> logs;
  std::vector<std::vector<agents::Trajectory>> batches(n);
  std::vector<std::vector<double>> returns(n);
  SelfPlayResult result;
  for (std::size_t i = 0; i < n; ++i) {
    agents_.push_back(std::make_unique<AgentState>(probe->schema(), probe->n_actions(), cfg.population[i], cfg.seed,
                                                   static_cast<std::uint64_t>(i + 1)));
    seats.push_back(std::make_unique<Seat>(cfg.population[i],
                                           RngStream(cfg.seed, streams::kPolicy).derive(static_cast<std::uint64_t>(i)),
                                           true));
    result.ids.push_back(member_id(i, cfg.population[i]));
    logs.emplace_back(cfg.out / ("metrics_" + result.ids[i] + ".csv"), stamp, metrics_columns());
    const auto path = cfg.out / "checkpoints" / (result.ids[i] + "_step_0.drl");
    std::filesystem::create_directories(path.parent_path());
    agents::save_checkpoint(path, agents_[i]->checkpoint(cfg.env_name, cfg.config_hash, cfg.seed));
  }
  CsvLog rewards(cfg.out / "rewards.csv", stamp, {"round", "agent", "opponent", "step", "episode_return"});

  const auto done = [&] {
    for (const auto& a : agents_) {
      if (a->steps < cfg.steps) return false;
    }
    return true;
  };
  std::uint64_t episode = 0;
  const auto learn = [&](std::size_t k, agents::Trajectory&& tr) {
    if (agents_[k]->steps >= cfg.steps) return;
    batches[k].push_back(std::move(tr));
    if (static_cast<int>(batches[k].size()) == cfg.batch) {
      const auto m = guarded_update(*agents_[k], batches[k], cfg.out / ("diagnostic_" + result.ids[k]), stamp);
      logs[k].row(metrics_row(agents_[k]->steps, 0, m, agents_[k]->nets.model() != nullptr));
      batches[k].clear();
    }
  };
  for (std::int64_t round = 0; !done(); ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      for (int e = 0; e < cfg.scripted_episodes; ++e) {
        const auto out = play_scripted(cfg, agents_[i]->nets, agents_[i]->params, *seats[i],
                                       RngStream(cfg.seed, streams::kEnv).derive(episode++),
                                       [&](agents::Trajectory&& tr) { learn(i, std::move(tr)); });
        agents_[i]->steps += out.steps;
        returns[i].push_back(out.ret[0]);
        rewards.row({fmt(round), result.ids[i], "scripted", fmt(agents_[i]->steps), fmt(out.ret[0])});
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        for (int e = 0; e < cfg.episodes_per_pair; ++e) {
          const bool swap = (round + e) % 2 == 1;
          const std::array<std::size_t, 2> who = swap ? std::array{j, i} : std::array{i, j};
          const Sink sink = [&](int side, agents::Trajectory&& tr) {
            learn(who[static_cast<std::size_t>(side)], std::move(tr));
          };
          const auto out = play_episode(
              cfg, {&agents_[who[0]]->nets, &agents_[who[1]]->nets}, {agents_[who[0]]->params, agents_[who[1]]->params},
              {seats[who[0]].get(), seats[who[1]].get()}, RngStream(cfg.seed, streams::kEnv).derive(episode++), false,
              sink);
          for (int side = 0; side < 2; ++side) {
            const std::size_t k = who[static_cast<std::size_t>(side)];
            agents_[k]->steps += out.steps;
            returns[k].push_back(out.ret[static_cast<std::size_t>(side)]);
            rewards.row({fmt(round), result.ids[k], result.ids[who[static_cast<std::size_t>(1 - side)]],
                         fmt(agents_[k]->steps), fmt(out.ret[static_cast<std::size_t>(side)])});
          }
        }
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto path = cfg.out / "checkpoints" / (result.ids[i] + "_final.drl");
    agents::save_checkpoint(path, agents_[i]->checkpoint(cfg.env_name, cfg.config_hash, cfg.seed));
    result.checkpoints.push_back(path);
    result.steps.push_back(agents_[i]->steps);
    const auto& r = returns[i];
    const std::size_t from = r.size() - std::max<std::size_t>(1, r.size() / 4);
    double sum = 0.0;
    for (std::size_t k = from; k < r.size(); ++k) sum += r[k];
    result.mean_return.push_back(r.empty() ? 0.0 : sum / static_cast<double>(r.size() - from));
  }
  return result;
}

nlohmann::json to_json(const MatchResult& r) {
  return {{"agent_a", r.agent_a},
          {"agent_b", r.agent_b},
          {"episodes", r.episodes},
          {"mean_reward_a", r.mean_reward_a},
          {"mean_reward_b", r.mean_reward_b},
          {"ko_a", r.ko_a},
          {"ko_b", r.ko_b},
          {"wins_a", r.wins_a},
          {"wins_b", r.wins_b},
          {"draws", r.draws},
          {"win_rate_a", r.win_rate_a},
          {"ci_lo", r.ci.lo},
          {"ci_hi", r.ci.hi},
          {"config_hash", r.config_hash},
          {"code_version", std::string(kCodeVersion)},
          {"ruleset", std::string(envs::MeleeRules::kVersion)},
          {"seed", r.seed}};
}

MatchResult head_to_head(const ExperimentConfig& cfg, const std::filesystem::path& a, const std::filesystem::path& b,
                         int episodes, std::uint64_t seed) {
  require_two_player(cfg, "match");
  if (episodes <= 0) throw UsageError("config key 'match.episodes': need at least one episode, got " +
                                      std::to_string(episodes));
  const auto probe = envs::make_two_player_env(cfg.env_name, cfg.env_params, RngStream(seed, streams::kEnv));
  const agents::Checkpoint ca = agents::load_checkpoint(a);
  const agents::Checkpoint cb = agents::load_checkpoint(b);
  agents::require_compatible(ca, probe->schema(), probe->n_actions(), "match.a (" + a.string() + ")");
  agents::require_compatible(cb, probe->schema(), probe->n_actions(), "match.b (" + b.string() + ")");
  if (ca.config.f != cb.config.f) {
    throw UsageError("match: both agents must share the frame skip (f = " + std::to_string(ca.config.f) + " vs " +
                     std::to_string(cb.config.f) + ")");
  }
  const agents::AgentNets na(ca.schema, ca.n_actions, ca.config);
  const agents::AgentNets nb(cb.schema, cb.n_actions, cb.config);
  Seat sa(ca.config, RngStream(seed, streams::kPolicy).derive(0), false);
  Seat sb(cb.config, RngStream(seed, streams::kPolicy).derive(1), false);

  MatchResult m;
  m.agent_a = a.stem().string();
  m.agent_b = b.stem().string();
  m.episodes = episodes;
  m.config_hash = cfg.config_hash;
  m.seed = seed;
  double sum_a = 0.0, sum_b = 0.0;
  for (int e = 0; e < episodes; ++e) {
    const bool a_first = e % 2 == 0;
    const auto env_rng = RngStream(seed, streams::kEnv).derive(static_cast<std::uint64_t>(e));
    const auto out = a_first ? play_episode(cfg, {&na, &nb}, {ca.params, cb.params}, {&sa, &sb}, env_rng,
                                            cfg.match.greedy, nullptr)
                             : play_episode(cfg, {&nb, &na}, {cb.params, ca.params}, {&sb, &sa}, env_rng,
                                            cfg.match.greedy, nullptr);
    const double ra = out.ret[a_first ? 0 : 1];
    const double rb = out.ret[a_first ? 1 : 0];
    sum_a += ra;
    sum_b += rb;
    m.ko_a += out.ko[a_first ? 0 : 1];
    m.ko_b += out.ko[a_first ? 1 : 0];
    if (std::abs(ra) < 1e-9) {
      ++m.draws;
    } else if (ra > 0.0) {
      ++m.wins_a;
    } else {
      ++m.wins_b;
    }
  }
  m.mean_reward_a = sum_a / episodes;
  m.mean_reward_b = sum_b / episodes;
  const double score = m.wins_a + 0.5 * m.draws;
  m.win_rate_a = score / episodes;
  m.ci = wilson_interval(score, episodes);
  return m;
}

std::size_t first_difference(const std::filesystem::path& a, const std::filesystem::path& b) {
  std::ifstream fa(a), fb(b);
  if (!fa) throw UsageError("cannot read '" + a.string() + "'");
  if (!fb) throw UsageError("cannot read '" + b.string() + "'");
  std::string la, lb;
  for (std::size_t line = 1;; ++line) {
    const bool ga = static_cast<bool>(std::getline(fa, la));
    const bool gb = static_cast<bool>(std::getline(fb, lb));
    if (!ga && !gb) return 0;
    if (ga != gb || la != lb) return line;
  }
}

DeterminismReport determinism_check(const ExperimentConfig& cfg, std::uint64_t seed_a, std::uint64_t seed_b) {
  DeterminismReport rep;
  if (cfg.parallel()) {
    rep.status = DeterminismReport::Status::not_applicable;
    rep.message = "not applicable: parallel mode (run.workers = " + std::to_string(cfg.workers) +
                  ", run.deterministic = false) promises no bit-identical output";
    return rep;
  }
  std::array<std::filesystem::path, 2> files;
  const std::array<std::uint64_t, 2> seeds{seed_a, seed_b};
  for (int k = 0; k < 2; ++k) {
    Config c = cfg.source;
    const auto dir = cfg.out / (k == 0 ? "run_a" : "run_b");
    std::filesystem::remove_all(dir);
    c.set("run.seed", std::to_string(seeds[k]), "determinism");
    c.set("run.out", dir.string(), "determinism");
    c.set("run.deterministic", "true", "determinism");
    auto x = make_experiment(c);
    x.resume.clear();
    train(x);
    files[k] = dir / "metrics.csv";
  }
  rep.first_divergent_line = first_difference(files[0], files[1]);
  if (rep.first_divergent_line == 0) {
    rep.status = DeterminismReport::Status::pass;
    rep.message = "metrics identical: " + files[0].string() + " == " + files[1].string();
  } else {
    rep.status = DeterminismReport::Status::fail;
    rep.message = "metrics differ from line " + std::to_string(rep.first_divergent_line) + ": " +
                  files[0].string() + " vs " + files[1].string();
  }
  return rep;
}

std::vector<SweepPoint> expand_grid(const std::string& grid) {
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  std::string item;
  std::vector<std::string> parts;
  for (char c : grid + ";") {
    if (c == ';' || c == ' ') {
      if (!item.empty()) parts.push_back(item);
      item.clear();
    } else {
      item += c;
    }
  }
  if (parts.empty()) throw UsageError("config key 'sweep.grid': empty grid");
  for (const auto& p : parts) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == p.size()) {
      throw UsageError("config key 'sweep.grid': '" + p + "' is not of the form key=v1,v2,...");
    }
    std::string key = p.substr(0, eq);
    if (key.find('.') == std::string::npos) key = "agent." + key;
    std::vector<std::string> values;
    std::string v;
    for (char c : p.substr(eq + 1) + ",") {
      if (c == ',') {
        if (v.empty()) throw UsageError("config key 'sweep.grid': empty value in '" + p + "'");
        values.push_back(v);
        v.clear();
      } else {
        v += c;
      }
    }
    axes.emplace_back(key, values);
  }
  std::vector<SweepPoint> points(1);
  for (const auto& [key, values] : axes) {
    std::vector<SweepPoint> next;
    for (const auto& pt : points) {
      for (const auto& v : values) {
        SweepPoint q = pt;
        q.assignment.emplace_back(key, v);
        next.push_back(q);
      }
    }
    points = std::move(next);
  }
  return points;
}

std::vector<SweepRun> sweep(const ExperimentConfig& cfg, const std::string& grid) {
  const auto points = expand_grid(grid);
  std::filesystem::create_directories(cfg.out);
  CsvLog summary(cfg.out / "sweep.csv", make_stamp(cfg.config_hash, cfg.seed),
                 {"label", "d", "p", "f", "seed", "steps", "final_mean_return", "final_greedy_return"});
  std::vector<SweepRun> runs;
  for (const auto& pt : points) {
    for (const auto seed : cfg.seeds) {
      Config c = cfg.source;
      for (const auto& [k, v] : pt.assignment) c.set(k, v, "sweep.grid");
      c.set("run.seed", std::to_string(seed), "sweep");
      ExperimentConfig x;
      try {
        x = make_experiment(c);
      } catch (const UsageError& e) {
        std::cerr << "sweep: skipping invalid grid point: " << e.what() << "\n";
        continue;
      }
      std::string label = "d" + std::to_string(x.agent.d) + "_p" + std::to_string(x.agent.p) + "_f" +
                          std::to_string(x.agent.f);
      for (const auto& [k, v] : pt.assignment) {
        if (k != "agent.d" && k != "agent.p" && k != "agent.f") label += "_" + k.substr(k.find('.') + 1) + v;
      }
      const auto dir = cfg.out / (cfg.seeds.size() > 1 ? label + "_s" + std::to_string(seed) : label);
      c.set("run.out", dir.string(), "sweep");
      x = make_experiment(c);
      const auto res = train(x);
      SweepRun r{label, seed, dir, res.evals.empty() ? std::nan("") : res.evals.back().mean_return};
      summary.row({label, fmt(std::int64_t{x.agent.d}), fmt(std::int64_t{x.agent.p}), fmt(std::int64_t{x.agent.f}),
                   fmt(static_cast<std::int64_t>(seed)), fmt(res.steps), fmt(r.final_return),
                   fmt(res.evals.empty() ? std::nan("") : res.evals.back().greedy_mean_return)});
      runs.push_back(r);
    }
  }
  if (runs.empty()) throw UsageError("config key 'sweep.grid': no valid grid point in '" + grid + "'");
  return runs;
}

}  // namespace drl::harness
