#include "cmae/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <thread>

#include "cmae/error.hpp"
#include "cmae/explore.hpp"
#include "cmae/replay.hpp"
#include "cmae/snapshot.hpp"
#include "cmae/spacetree.hpp"

namespace cmae {

namespace {

constexpr size_t kMatchedCap = 512;

std::string csv_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

class TrainingRun {
 public:
  TrainingRun(const RunConfig& cfg, uint64_t seed)
      : cfg_(cfg),
        seed_(seed),
        spec_(cfg.task_spec()),
        packer_(component_cardinalities(spec_)),
        rng_(Rng::derive_seed(seed, 0x7261)),
        env_(make_env(spec_)),
        eval_env_(make_env(spec_)),
        replay_(cfg.replay_capacity),
        schedule_{1.0, cfg.effective_alpha_horizon()} {
    for (int i = 0; i < spec_.n_agents; ++i) {
      target_.emplace_back(spec_.action_count, cfg.step_size_target, cfg.gamma);
      if (cfg.algo == Algo::kCmae)
        explore_.emplace_back(spec_.action_count, cfg.step_size_explore, cfg.gamma);
    }
    if (cfg.algo == Algo::kCmae)
      tree_ = SpaceTree(packer_.cardinalities(), cfg.max_space_dims);
    if (cfg.algo == Algo::kQlearnBonus)
      full_counter_ = Counter(packer_.domain_size());
  }

  RunArtifacts run() {
    open_artifacts();

    uint64_t step = 0;
    uint64_t episode = 0;
    while (step < cfg_.total_env_steps) {
      auto [state, obs] = env_->reset(Rng::derive_seed(seed_, episode));
      episode_start_key_ = packer_.pack(state);
      const uint64_t episode_begin = replay_.end_index();
      if (cfg_.algo == Algo::kCmae && cfg_.mixture_per_episode)
        episode_explores_ = rng_.bernoulli(schedule_.alpha(step));
      bool done = false;
      while (!done && step < cfg_.total_env_steps) {
        const uint64_t state_key = packer_.pack(state);
        const JointAction action = act(state_key, step);
        const StepResult res = env_->step(action);

        TransitionRecord rec;
        rec.state = state;
        rec.joint_obs = obs;
        rec.joint_action = action;
        rec.next_state = res.state;
        rec.next_joint_obs = res.obs;
        rec.reward = res.reward;
        rec.done = res.done;
        rec.step_index = env_->steps_taken() - 1;
        if (cfg_.algo == Algo::kQlearnBonus) {
          const uint64_t next_key = packer_.pack(res.state);
          full_counter_.increment(next_key);
          rec.bonus = static_cast<float>(
              count_bonus_reward(full_counter_, next_key, cfg_.bonus_beta));
        }

        const uint64_t rec_index = replay_.end_index();
        replay_.push(rec);
        if (cfg_.algo == Algo::kCmae) {
          tree_.update_all(res.state);
          if (goal_ && goal_matches(*goal_, tree_, rec.state, cfg_.match_mode)) {
            remember_match(rec_index);
            ++goal_visits_;
          }
        }
        train_target();

        state = res.state;
        obs = res.obs;
        done = res.done;
        ++step;
        if (eval_interval_ > 0 && step % eval_interval_ == 0) evaluate_checkpoint(step);
      }
      ++episode;
      if (cfg_.algo == Algo::kCmae) {
        if (episode % static_cast<uint64_t>(cfg_.goal_period) == 0)
          select_new_goal(step, episode);
        exploration_pass(episode_begin);
      }
    }

    finalize_artifacts();
    artifacts_.seed = seed_;
    artifacts_.env_steps = step;
    artifacts_.episodes = episode;
    return std::move(artifacts_);
  }

 private:
  JointAction act(uint64_t state_key, uint64_t step) {
    if (cfg_.algo == Algo::kCmae) {
      if (cfg_.mixture_per_episode) {
        const auto& tables = episode_explores_ ? explore_ : target_;
        return act_epsilon_greedy(tables, state_key,
                                  cfg_.mixture_epsilon * schedule_.alpha(step), rng_);
      }
      return act_mixture(explore_, target_, state_key, step, schedule_,
                         cfg_.mixture_epsilon, rng_);
    }
    const double frac = cfg_.eps_anneal_steps == 0
                            ? 1.0
                            : std::min(1.0, static_cast<double>(step) /
                                                static_cast<double>(cfg_.eps_anneal_steps));
    const double eps = cfg_.eps_start + (cfg_.eps_end - cfg_.eps_start) * frac;
    return act_epsilon_greedy(target_, state_key, eps, rng_);
  }

  void train_target() {
    if (cfg_.target_batch <= 0 || replay_.empty()) return;
    for (int b = 0; b < cfg_.target_batch; ++b) {
      const TransitionRecord& rec = replay_.sample(rng_);
      std::optional<double> override;
      if (cfg_.algo == Algo::kQlearnBonus) override = rec.reward + rec.bonus;
      for (int agent = 0; agent < spec_.n_agents; ++agent)
        q_update(target_[agent], packer_, rec, agent, override);
    }
  }

  void select_new_goal(uint64_t step, uint64_t episode) {
    auto goal = select_goal(tree_, replay_, rng_, cfg_.goal_batch, cfg_.goal_bonus,
                            cfg_.goal_recent_window);
    if (episode % static_cast<uint64_t>(cfg_.expand_period) == 0 && goal)
      tree_.expand(goal->k, replay_.state_source());
    if (!goal) return;  // empty replay: keep the previous goal
    if (goal_log_.is_open() && goal_)
      goal_log_ << "tenure_visits=" << goal_visits_ << '\n';
    goal_visits_ = 0;
    goal_ = std::move(goal);
    rebuild_matched();
    if (cfg_.reset_explore_on_goal)
      for (auto& table : explore_)
        table = QTable(spec_.action_count, cfg_.step_size_explore, cfg_.gamma);
    // Rebuild the exploration values for the fresh goal: newest-first
    // assignment sweeps over recent history give full-magnitude
    // goal-distance chains along every stored trajectory.
    if (cfg_.exp_sweep_window > 0 && cfg_.dp_passes > 0) {
      for (auto& table : explore_)
        table = QTable(spec_.action_count, cfg_.step_size_explore, cfg_.gamma);
      const uint64_t lo =
          std::max(replay_.begin_index(),
                   replay_.end_index() -
                       std::min<uint64_t>(cfg_.exp_sweep_window, replay_.size()));
      for (int pass = 0; pass < cfg_.dp_passes; ++pass)
        for (uint64_t g = replay_.end_index(); g-- > lo;)
          exploration_dp_backup(explore_, packer_, replay_.at_global(g), goal_, tree_,
                                cfg_.match_mode, cfg_.explore_goal_terminal);
    }
    if (goal_log_.is_open()) {
      goal_log_ << "step=" << step << " episode=" << episode
                << " k=" << goal_->k.to_string() << " key=";
      const auto comps = tree_.unpack_key(goal_->key, goal_->k);
      for (size_t i = 0; i < comps.size(); ++i) {
        if (i) goal_log_ << ':';
        goal_log_ << comps[i];
      }
      goal_log_ << " state=" << goal_->full_state.to_string();
      char buf[64];
      std::snprintf(buf, sizeof(buf), " matched=%zu q_start=%.4f", matched_.size(),
                    explore_.empty() ? 0.0 : explore_[0].max_q(episode_start_key_));
      goal_log_ << buf << '\n';
    }
  }

  void rebuild_matched() {
    matched_.clear();
    const uint64_t end = replay_.end_index();
    const uint64_t window = std::min<uint64_t>(cfg_.matched_scan_window, replay_.size());
    for (uint64_t g = end - window; g < end; ++g) {
      if (goal_matches(*goal_, tree_, replay_.at_global(g).state, cfg_.match_mode))
        remember_match(g);
    }
    remember_match(goal_->source_index);
  }

  void remember_match(uint64_t global_index) {
    matched_.push_back(global_index);
    if (matched_.size() > kMatchedCap) matched_.pop_front();
  }

  void exploration_pass(uint64_t episode_begin) {
    if (replay_.empty()) return;
    // Newest-first passes over the finished episode propagate value along
    // the trajectory.
    const uint64_t lo = std::max(episode_begin, replay_.begin_index());
    for (int pass = 0; pass < cfg_.backward_passes; ++pass)
      for (uint64_t g = replay_.end_index(); g-- > lo;)
        exploration_update(explore_, packer_, replay_.at_global(g), goal_, tree_,
                           cfg_.match_mode, cfg_.explore_goal_terminal);
    train_exploration(explore_, packer_, replay_, goal_, tree_, cfg_.match_mode, rng_,
                      cfg_.explore_batch, cfg_.explore_goal_terminal);
    int taken = 0;
    for (auto it = matched_.rbegin(); it != matched_.rend(); ++it) {
      if (taken >= cfg_.matched_per_episode) break;
      if (*it < replay_.begin_index()) break;  // evicted
      exploration_update(explore_, packer_, replay_.at_global(*it), goal_, tree_,
                         cfg_.match_mode, cfg_.explore_goal_terminal);
      ++taken;
    }
  }

  void evaluate_checkpoint(uint64_t step) {
    const uint64_t eval_seed =
        Rng::derive_seed(seed_, 0xE7A1000 + artifacts_.records.size());
    EvalOutcome out = evaluate_policies(*eval_env_, target_, cfg_.eval_episodes, eval_seed);
    EvalRecord rec;
    rec.env_step = step;
    rec.success_rate = out.success_rate;
    rec.mean_return = out.mean_return;
    rec.episode_returns = std::move(out.episode_returns);
    rec.episode_success = std::move(out.episode_success);
    if (metrics_.is_open())
      metrics_ << step << ',' << csv_double(rec.success_rate) << ','
               << csv_double(rec.mean_return) << '\n';
    artifacts_.records.push_back(std::move(rec));

    if (!cfg_.out_dir.empty() && cfg_.snapshot_interval > 0 &&
        artifacts_.records.size() % static_cast<size_t>(cfg_.snapshot_interval) == 0) {
      const std::string path = cfg_.out_dir + "/snapshot_seed" + std::to_string(seed_) +
                               "_e" + std::to_string(artifacts_.records.size()) + ".qt";
      save_qtables(path, target_);
      artifacts_.snapshot_paths.push_back(path);
    }
  }

  void open_artifacts() {
    eval_interval_ = cfg_.effective_eval_interval();
    if (cfg_.out_dir.empty()) return;
    std::filesystem::create_directories(cfg_.out_dir);
    artifacts_.metrics_path =
        cfg_.out_dir + "/metrics_seed" + std::to_string(seed_) + ".csv";
    metrics_.open(artifacts_.metrics_path);
    if (!metrics_) throw ConfigError("cannot write " + artifacts_.metrics_path);
    metrics_ << "env_step,success_rate,mean_return\n";
    if (cfg_.algo == Algo::kCmae) {
      goal_log_.open(cfg_.out_dir + "/goals_seed" + std::to_string(seed_) + ".log");
      if (!goal_log_) throw ConfigError("cannot write goal log");
    }
  }

  void finalize_artifacts() {
    if (cfg_.out_dir.empty()) return;
    const std::string prefix = cfg_.out_dir + "/";
    const std::string final_path =
        prefix + "snapshot_seed" + std::to_string(seed_) + "_final.qt";
    save_qtables(final_path, target_);
    artifacts_.snapshot_paths.push_back(final_path);
    if (cfg_.algo == Algo::kCmae) {
      std::ofstream tree_out(prefix + "tree_seed" + std::to_string(seed_) + ".txt");
      tree_.export_summary(tree_out);
      save_counters(prefix + "counters_seed" + std::to_string(seed_) + ".bin", tree_);
    }
  }

  RunConfig cfg_;
  uint64_t seed_;
  TaskSpec spec_;
  StatePacker packer_;
  Rng rng_;
  std::unique_ptr<Env> env_;
  std::unique_ptr<Env> eval_env_;
  ReplayBuffer replay_;
  MixtureSchedule schedule_;
  std::vector<QTable> target_;
  std::vector<QTable> explore_;
  SpaceTree tree_;
  Counter full_counter_;
  std::optional<Goal> goal_;
  bool episode_explores_ = true;
  uint64_t episode_start_key_ = 0;
  uint64_t goal_visits_ = 0;
  std::deque<uint64_t> matched_;
  uint64_t eval_interval_ = 0;
  std::ofstream metrics_;
  std::ofstream goal_log_;
  RunArtifacts artifacts_;
};

}  // namespace

FinalMetric final_metric(std::span<const EvalRecord> records) {
  constexpr size_t kLast = 10;
  if (records.size() < kLast)
    throw InsufficientData("final_metric: needs at least 10 evaluation records");
  double success = 0.0;
  double ret = 0.0;
  size_t episodes = 0;
  for (size_t i = records.size() - kLast; i < records.size(); ++i) {
    const EvalRecord& r = records[i];
    for (size_t e = 0; e < r.episode_returns.size(); ++e) {
      success += r.episode_success[e];
      ret += r.episode_returns[e];
      ++episodes;
    }
  }
  return {success / episodes, ret / episodes};
}

EvalOutcome evaluate_policies(Env& env, std::span<const QTable> tables, int episodes,
                              uint64_t eval_seed) {
  const StatePacker packer(component_cardinalities(env.spec()));
  Rng rng(eval_seed);
  EvalOutcome out;
  for (int ep = 0; ep < episodes; ++ep) {
    auto [state, obs] = env.reset(Rng::derive_seed(eval_seed, ep));
    double ep_return = 0.0;
    bool done = false;
    while (!done) {
      const JointAction a = act_epsilon_greedy(tables, packer.pack(state), 0.0, rng);
      const StepResult res = env.step(a);
      ep_return += res.reward;
      state = res.state;
      done = res.done;
    }
    out.episode_returns.push_back(ep_return);
    out.episode_success.push_back(env.solved() ? 1 : 0);
    out.mean_return += ep_return;
    out.success_rate += env.solved() ? 1.0 : 0.0;
  }
  out.mean_return /= episodes;
  out.success_rate /= episodes;
  return out;
}

RunArtifacts run_training(const RunConfig& cfg, uint64_t seed) {
  cfg.validate();
  return TrainingRun(cfg, seed).run();
}

std::vector<RunArtifacts> run_training_all(const RunConfig& cfg) {
  cfg.validate();
  std::vector<RunArtifacts> results(cfg.seeds.size());
  const int workers = std::min<int>(cfg.parallel, static_cast<int>(cfg.seeds.size()));
  if (workers <= 1) {
    for (size_t i = 0; i < cfg.seeds.size(); ++i) results[i] = run_training(cfg, cfg.seeds[i]);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const size_t i = next.fetch_add(1);
          if (i >= cfg.seeds.size()) return;
          results[i] = run_training(cfg, cfg.seeds[i]);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  if (!cfg.out_dir.empty() && !results.empty()) {
    std::ofstream agg(cfg.out_dir + "/aggregate.csv");
    agg << "env_step,success_mean,success_std,return_mean,return_std\n";
    const size_t n_records = results.front().records.size();
    const double n = static_cast<double>(results.size());
    for (size_t r = 0; r < n_records; ++r) {
      double s_mean = 0, s_sq = 0, r_mean = 0, r_sq = 0;
      for (const auto& run : results) {
        s_mean += run.records[r].success_rate;
        r_mean += run.records[r].mean_return;
      }
      s_mean /= n;
      r_mean /= n;
      for (const auto& run : results) {
        s_sq += (run.records[r].success_rate - s_mean) * (run.records[r].success_rate - s_mean);
        r_sq += (run.records[r].mean_return - r_mean) * (run.records[r].mean_return - r_mean);
      }
      const double s_std = n > 1 ? std::sqrt(s_sq / (n - 1)) : 0.0;
      const double r_std = n > 1 ? std::sqrt(r_sq / (n - 1)) : 0.0;
      agg << results.front().records[r].env_step << ',' << csv_double(s_mean) << ','
          << csv_double(s_std) << ',' << csv_double(r_mean) << ',' << csv_double(r_std)
          << '\n';
    }
  }
  return results;
}

AbsoluteMetric absolute_metric(const std::vector<std::vector<QTable>>& snapshots, Env& env,
                               int episodes, uint64_t eval_seed) {
  if (snapshots.empty())
    throw InsufficientData("absolute_metric: at least one snapshot required");
  AbsoluteMetric best;
  for (size_t i = 0; i < snapshots.size(); ++i) {
    const EvalOutcome out = evaluate_policies(
        env, snapshots[i], episodes, Rng::derive_seed(eval_seed, i));
    if (best.best_index < 0 || out.mean_return > best.mean_return) {
      best.mean_return = out.mean_return;
      best.success_rate = out.success_rate;
      best.best_index = static_cast<int>(i);
    }
  }
  return best;
}

AbsoluteMetric absolute_metric_from_files(const std::vector<std::string>& paths, Env& env,
                                          int episodes) {
  std::vector<std::vector<QTable>> snapshots;
  snapshots.reserve(paths.size());
  for (const auto& p : paths) snapshots.push_back(load_qtables(p));
  return absolute_metric(snapshots, env, episodes);
}

}  // namespace cmae
