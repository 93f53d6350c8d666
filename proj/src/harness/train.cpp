#include "drl/harness/train.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "drl/core/errors.hpp"
#include "drl/core/serialize.hpp"
#include "drl/core/version.hpp"
#include "drl/envs/minimelee.hpp"
#include "drl/harness/actor.hpp"
#include "drl/harness/scripted.hpp"

namespace drl::harness {

AgentState::AgentState(const StateSchema& schema, int n_actions, const agents::AgentConfig& config,
                       std::uint64_t seed, std::uint64_t member)
    : nets(schema, n_actions, config), adam(nets.n_params(), config.adam) {
  RngStream rng = member == 0 ? RngStream(seed, streams::kInit) : RngStream(seed, streams::kInit).derive(member);
  params = nets.init_params(rng);
}

agents::Checkpoint AgentState::checkpoint(const std::string& env, const std::string& config_hash,
                                          std::uint64_t seed) const {
  agents::Checkpoint c;
  c.schema = nets.schema();
  c.n_actions = nets.n_actions();
  c.config = nets.config();
  c.params = params;
  c.adam_steps = adam.steps();
  c.adam_m = adam.first_moment();
  c.adam_v = adam.second_moment();
  c.meta = {steps, env, std::string(envs::MeleeRules::kVersion), std::string(kCodeVersion), config_hash, seed};
  return c;
}

void AgentState::restore(const agents::Checkpoint& ckpt) {
  agents::require_compatible(ckpt, nets.schema(), nets.n_actions(), "resume");
  if (ckpt.params.size() != params.size()) {
    throw UsageError("resume: checkpoint network sizes differ from the [agent] config");
  }
  params = ckpt.params;
  adam.restore(ckpt.adam_steps, ckpt.adam_m, ckpt.adam_v);
  steps = ckpt.meta.step;
}

std::unique_ptr<envs::Environment> make_training_env(const ExperimentConfig& cfg, const RngStream& rng) {
  if (cfg.two_player()) {
    auto game = envs::make_two_player_env(cfg.env_name, cfg.env_params, rng);
    return std::make_unique<ScriptedVersusEnv>(std::move(game),
                                               ScriptedOpponent(cfg.opponent, rng.derive(streams::kOpponent)));
  }
  return envs::make_single_env(cfg.env_name, cfg.env_params, rng);
}

EvalResult evaluate(const ExperimentConfig& cfg, const agents::AgentNets& nets, nn::ConstParams params,
                    std::uint64_t seed, std::uint64_t stream, int episodes) {
  require(episodes > 0, "evaluate: need at least one episode");
  const RngStream base(seed, stream);
  std::vector<double> sampled, greedy;
  for (int mode = 0; mode < 2; ++mode) {
    const RngStream r = base.derive(static_cast<std::uint64_t>(mode));
    Actor actor(make_training_env(cfg, r.derive(streams::kEnv)), nets.config(), r.derive(streams::kEnv),
                r.derive(streams::kPolicy), false);
    auto& out = mode == 0 ? sampled : greedy;
    for (int e = 0; e < episodes; ++e) out.push_back(actor.episode(nets, params, mode == 1));
  }
  EvalResult res;
  res.episodes = episodes;
  const auto m = mean_interval(sampled);
  res.mean_return = m.mean;
  res.ci = m.ci;
  res.greedy_mean_return = mean_interval(greedy).mean;
  return res;
}

namespace {

void write_batch(ByteWriter& w, std::span<const agents::Trajectory> batch) {
  w.u32(static_cast<std::uint32_t>(batch.size()));
  for (const auto& tr : batch) {
    w.u32(static_cast<std::uint32_t>(tr.size()));
    w.u32(tr.terminal ? 1 : 0);
    write_state(w, tr.final_state);
    for (const auto& st : tr.steps) {
      write_state(w, st.state);
      w.u32(static_cast<std::uint32_t>(st.queue.size()));
      for (const auto& a : st.queue) w.u32(static_cast<std::uint32_t>(a.index));
      w.u32(static_cast<std::uint32_t>(st.chosen.index));
      w.u32(static_cast<std::uint32_t>(st.executed.index));
      w.f64(st.reward);
      w.f64(st.behavior_logprob);
      w.f64s(std::span<const double>(st.hidden.data(), static_cast<std::size_t>(st.hidden.size())));
    }
  }
}

}  // namespace

agents::LearnerMetrics guarded_update(AgentState& agent, std::span<const agents::Trajectory> batch,
                                      const std::filesystem::path& diag_dir, const RunStamp& stamp) {
  const std::vector<double> before = agent.params;
  try {
    return agents::learner_update(agent.nets, agent.params, agent.adam, batch);
  } catch (const TrainingError& e) {
    std::filesystem::create_directories(diag_dir);
    auto ckpt = agent.checkpoint("", stamp.config_hash, stamp.seed);
    ckpt.params = before;
    agents::save_checkpoint(diag_dir / "params.drl", ckpt);
    Archive ar;
    ByteWriter w;
    write_batch(w, batch);
    ar.put("BTCH", w.take());
    ByteWriter m;
    m.str(e.what());
    m.i64(agent.steps);
    ar.put("META", m.take());
    ar.save(diag_dir / "batch.drl");
    write_text(diag_dir / "error.txt", stamp.line() + "\nstep=" + std::to_string(agent.steps) + "\n" + e.what() + "\n");
    throw TrainingError(std::string(e.what()) + " (diagnostic bundle in " + diag_dir.string() + ")");
  }
}

std::vector<std::string> metrics_columns() {
  return {"step",    "wall_ms",   "mean_reward", "policy_loss",   "value_loss",
          "model_loss", "entropy", "grad_norm", "pred_accuracy", "pred_rmse"};
}

std::vector<std::string> metrics_row(std::int64_t step, std::int64_t wall_ms, const agents::LearnerMetrics& m,
                                     bool has_model) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return {fmt(step),          fmt(wall_ms),       fmt(m.mean_reward),
          fmt(m.policy_loss), fmt(m.value_loss),  fmt(has_model ? m.model_loss : nan),
          fmt(m.entropy),     fmt(m.grad_norm),   fmt(has_model ? m.pred_accuracy : nan),
          fmt(has_model ? m.pred_rmse : nan)};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
}

std::string config_echo(const ExperimentConfig& cfg) {
  std::string text = "# config_hash=" + cfg.config_hash + " code_version=" + std::string(kCodeVersion) + "\n";
  for (const auto& n : cfg.source.notes()) text += "# " + n + "\n";
  return text + cfg.source.echo();
}

namespace {

template <class T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t capacity) : capacity_(capacity) {}

  bool push(T item) {
    std::unique_lock lock(m_);
    not_full_.wait(lock, [&] { return q_.size() < capacity_ || closed_; });
    if (closed_) return false;
    q_.push_back(std::move(item));
    not_empty_.notify_one();
    return true;
  }
  std::optional<T> pop() {
    std::unique_lock lock(m_);
    not_empty_.wait(lock, [&] { return !q_.empty() || closed_; });
    if (q_.empty()) return std::nullopt;
    T item = std::move(q_.front());
    q_.pop_front();
    not_full_.notify_one();
    return item;
  }
  void close() {
    std::lock_guard lock(m_);
    closed_ = true;
    not_empty_.notify_all();
    not_full_.notify_all();
  }

 private:
  std::size_t capacity_;
  std::deque<T> q_;
  bool closed_ = false;
  std::mutex m_;
  std::condition_variable not_full_, not_empty_;
};

// Versioned read-only parameter snapshots published by the learner.
class ParamBoard {
 public:
  explicit ParamBoard(std::vector<double> p) : current_(std::make_shared<const std::vector<double>>(std::move(p))) {}
  void publish(const std::vector<double>& p) {
    auto next = std::make_shared<const std::vector<double>>(p);
    std::lock_guard lock(m_);
    current_ = std::move(next);
    ++version_;
  }
  std::pair<std::shared_ptr<const std::vector<double>>, std::uint64_t> snapshot() const {
    std::lock_guard lock(m_);
    return {current_, version_};
  }

 private:
  mutable std::mutex m_;
  std::shared_ptr<const std::vector<double>> current_;
  std::uint64_t version_ = 0;
};

struct Run {
  const ExperimentConfig& cfg;
  AgentState& agent;
  RunStamp stamp;
  std::filesystem::path dir;
  CsvLog metrics;
  CsvLog evals;
  TrainResult result;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  std::int64_t next_eval = 0;
  std::int64_t next_ckpt = 0;
  std::int64_t updates = 0;

  std::int64_t wall_ms() const {
    if (cfg.deterministic) return 0;
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  }

  static std::int64_t next_multiple(std::int64_t step, std::int64_t every) {
    return every <= 0 ? std::numeric_limits<std::int64_t>::max() : (step / every + 1) * every;
  }

  void save(const std::string& name) {
    const auto path = dir / "checkpoints" / name;
    std::filesystem::create_directories(path.parent_path());
    agents::save_checkpoint(path, agent.checkpoint(cfg.env_name, cfg.config_hash, stamp.seed));
    result.final_checkpoint = path;
  }

  void update(std::span<const agents::Trajectory> batch) {
    const auto m = guarded_update(agent, batch, dir / "diagnostic", stamp);
    ++updates;
    if (updates % cfg.log_every == 0) metrics.row(metrics_row(agent.steps, wall_ms(), m, agent.nets.model() != nullptr));
  }

  void maybe_evaluate_and_save(const std::vector<double>& params) {
    while (agent.steps >= next_eval) {
      auto e = evaluate(cfg, agent.nets, params, stamp.seed, streams::kEval + static_cast<std::uint64_t>(next_eval),
                        cfg.eval_episodes);
      e.step = next_eval;
      evals.row({fmt(e.step), fmt(std::int64_t{e.episodes}), fmt(e.mean_return), fmt(e.ci.lo), fmt(e.ci.hi),
                 fmt(e.greedy_mean_return)});
      result.evals.push_back(e);
      next_eval = next_multiple(next_eval, cfg.eval_every);
    }
    while (agent.steps >= next_ckpt) {
      save("step_" + std::to_string(next_ckpt) + ".drl");
      next_ckpt = next_multiple(next_ckpt, cfg.checkpoint_every);
    }
  }
};

void train_synchronous(Run& run) {
  const auto& cfg = run.cfg;
  auto& agent = run.agent;
  const RngStream base(run.stamp.seed, streams::kEnv);
  Actor actor(make_training_env(cfg, base), cfg.agent, base.derive(1),
              RngStream(run.stamp.seed, streams::kPolicy).derive(static_cast<std::uint64_t>(agent.steps)));
  std::vector<agents::Trajectory> batch;
  while (agent.steps < cfg.steps) {
    auto s = actor.step(agent.nets, agent.params);
    ++agent.steps;
    if (s.trajectory) batch.push_back(std::move(*s.trajectory));
    if (static_cast<int>(batch.size()) == cfg.batch) {
      run.update(batch);
      batch.clear();
    }
    if (agent.steps >= run.next_eval || agent.steps >= run.next_ckpt) run.maybe_evaluate_and_save(agent.params);
  }
}

void train_parallel(Run& run) {
  const auto& cfg = run.cfg;
  auto& agent = run.agent;
  ParamBoard board(agent.params);
  BoundedQueue<agents::Trajectory> queue(static_cast<std::size_t>(cfg.batch * cfg.workers * 2));
  std::atomic<std::int64_t> steps{agent.steps};
  std::atomic<bool> failed{false};
  std::exception_ptr worker_error;
  std::mutex error_m;
  std::atomic<int> running{cfg.workers};

  std::vector<std::thread> workers;
  for (int w = 0; w < cfg.workers; ++w) {
    workers.emplace_back([&, w] {
      try {
        const RngStream base(run.stamp.seed, streams::kWorker + static_cast<std::uint64_t>(w));
        Actor actor(make_training_env(cfg, base), cfg.agent, base.derive(1), base.derive(2));
        auto [params, version] = board.snapshot();
        while (!failed && steps.fetch_add(1) < cfg.steps) {
          auto s = actor.step(agent.nets, *params);
          if (s.trajectory) {
            if (!queue.push(std::move(*s.trajectory))) break;
            std::tie(params, version) = board.snapshot();
          }
        }
      } catch (...) {
        std::lock_guard lock(error_m);
        if (!worker_error) worker_error = std::current_exception();
        failed = true;
      }
      if (--running == 0) queue.close();
    });
  }

  std::vector<agents::Trajectory> batch;
  try {
    while (auto tr = queue.pop()) {
      batch.push_back(std::move(*tr));
      agent.steps = std::min(steps.load(), cfg.steps);
      if (static_cast<int>(batch.size()) == cfg.batch) {
        run.update(batch);
        batch.clear();
        board.publish(agent.params);
      }
      if (agent.steps >= run.next_eval || agent.steps >= run.next_ckpt) run.maybe_evaluate_and_save(agent.params);
    }
  } catch (...) {
    failed = true;
    queue.close();
    for (auto& t : workers) t.join();
    throw;
  }
  for (auto& t : workers) t.join();
  if (worker_error) std::rethrow_exception(worker_error);
  agent.steps = cfg.steps;
}

}  // namespace

TrainResult train(const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.out);
  auto env = make_training_env(cfg, RngStream(cfg.seed, streams::kEnv));
  AgentState agent(env->schema(), env->n_actions(), cfg.agent, cfg.seed);
  if (!cfg.resume.empty()) agent.restore(agents::load_checkpoint(cfg.resume));

  write_text(cfg.out / "config.cfg", config_echo(cfg));
  Run run{cfg, agent, make_stamp(cfg.config_hash, cfg.seed), cfg.out, {}, {}, {}};
  run.metrics = CsvLog(cfg.out / "metrics.csv", run.stamp, metrics_columns());
  run.evals = CsvLog(cfg.out / "eval.csv", run.stamp,
                     {"step", "episodes", "mean_return", "ci_lo", "ci_hi", "greedy_mean_return"});
  run.result.dir = cfg.out;
  run.next_eval = Run::next_multiple(agent.steps, cfg.eval_every);
  run.next_ckpt = Run::next_multiple(agent.steps, cfg.checkpoint_every);

  if (cfg.resume.empty()) run.save("step_0.drl");
  if (cfg.steps > agent.steps) {
    if (cfg.parallel()) {
      train_parallel(run);
    } else {
      train_synchronous(run);
    }
    if (cfg.eval_every > 0 && (run.result.evals.empty() || run.result.evals.back().step != agent.steps)) {
      run.next_eval = agent.steps;
      run.maybe_evaluate_and_save(agent.params);
    }
    run.save("final.drl");
  }
  run.result.steps = agent.steps;
  run.result.updates = run.updates;
  return run.result;
}

}  // namespace drl::harness
