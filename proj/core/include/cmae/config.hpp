#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cmae/env.hpp"
#include "cmae/explore.hpp"

namespace cmae {

enum class Algo { kCmae, kQlearn, kQlearnBonus };

Algo algo_from_string(const std::string& name);
std::string to_string(Algo algo);

// Everything that determines one training invocation. Defaults are the
// pinned values used by the acceptance runs; any field can be overridden by
// a key=value config file and then by CLI flags.
struct RunConfig {
  Task task = Task::kPass;
  RewardMode reward_mode = RewardMode::kSparse;
  Algo algo = Algo::kCmae;
  std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};

  uint64_t total_env_steps = 3'000'000;
  int horizon = 300;

  // Shared-goal machinery (episodes).
  int goal_period = 10;        // new goal every N episodes
  int expand_period = 50;      // tree expansion every N' episodes (multiple of N)
  int goal_batch = 256;        // states sampled per goal selection
  uint64_t goal_recent_window = 30'000;  // goal batch comes from this many newest records
  double goal_bonus = 1.0;     // reward added on reaching the goal
  int max_space_dims = 3;
  GoalMatchMode match_mode = GoalMatchMode::kRestricted;

  // Behavior mixing and residual noise.
  uint64_t alpha_horizon = 0;  // 0 = two thirds of total_env_steps
  double mixture_epsilon = 0.05;
  // Draw the exploration-vs-target branch once per episode instead of per
  // step; whole-episode rollouts keep goal pursuit coherent.
  bool mixture_per_episode = true;

  // Baseline exploration schedule and count bonus.
  double eps_start = 1.0;
  double eps_end = 0.05;
  uint64_t eps_anneal_steps = 1'000'000;
  double bonus_beta = 10.0;

  // Learning.
  size_t replay_capacity = 1'000'000;
  int target_batch = 32;
  int explore_batch = 256;
  double step_size_target = 0.05;
  double step_size_explore = 0.1;
  double gamma = 0.95;

  // Exploration-batch goal seeding: how far back to scan for transitions
  // matching a fresh goal, and how many matches to fold into each episode's
  // exploration pass.
  uint64_t matched_scan_window = 100'000;
  int matched_per_episode = 128;
  int backward_passes = 2;     // newest-first sweeps over the finished episode
  // After each goal selection the exploration tables are rebuilt from
  // scratch: `dp_passes` newest-first assignment sweeps over the last
  // `exp_sweep_window` records (0 = keep tables and skip the rebuild).
  uint64_t exp_sweep_window = 30'000;
  int dp_passes = 2;
  // Re-initialize exploration tables at each goal selection so stale value
  // peaks from previous goals cannot outweigh the current one.
  bool reset_explore_on_goal = false;
  // Treat goal-matched transitions as terminal in exploration updates.
  bool explore_goal_terminal = true;

  // Evaluation protocol.
  uint64_t eval_interval = 0;  // 0 = total_env_steps / 100
  int eval_episodes = 10;
  int snapshot_interval = 0;   // snapshot every k-th eval; 0 = final only

  int matrix_actions = 3;
  std::string out_dir;          // empty = no artifacts written
  int parallel = 1;             // seeds trained concurrently

  void validate() const;
  uint64_t effective_eval_interval() const;
  uint64_t effective_alpha_horizon() const;
  TaskSpec task_spec() const;
};

// Applies one key=value entry; unknown keys are configuration errors.
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);

// Flat key=value file: one entry per line, '#' comments, blank lines ignored.
RunConfig parse_config_file(const std::string& path, RunConfig base = {});

std::vector<uint64_t> parse_seed_list(const std::string& text);

}  // namespace cmae
