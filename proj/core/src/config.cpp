#include "cmae/config.hpp"

#include <fstream>
#include <sstream>

#include "cmae/error.hpp"

namespace cmae {

Algo algo_from_string(const std::string& name) {
  if (name == "cmae") return Algo::kCmae;
  if (name == "qlearn") return Algo::kQlearn;
  if (name == "qlearn-bonus" || name == "qlearn_bonus") return Algo::kQlearnBonus;
  throw ConfigError("unknown algo: " + name);
}

std::string to_string(Algo algo) {
  switch (algo) {
    case Algo::kCmae: return "cmae";
    case Algo::kQlearn: return "qlearn";
    case Algo::kQlearnBonus: return "qlearn-bonus";
  }
  return "?";
}

void RunConfig::validate() const {
  if (seeds.empty()) throw ConfigError("at least one seed required");
  if (total_env_steps < 1) throw ConfigError("total_env_steps must be >= 1");
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (goal_period < 1 || expand_period < 1)
    throw ConfigError("goal_period and expand_period must be >= 1");
  if (expand_period % goal_period != 0)
    throw ConfigError("expand_period must be a multiple of goal_period");
  if (goal_batch < 1) throw ConfigError("goal_batch must be >= 1");
  if (max_space_dims < 1) throw ConfigError("max_space_dims must be >= 1");
  if (replay_capacity < 1) throw ConfigError("replay_capacity must be >= 1");
  if (target_batch < 0 || explore_batch < 0) throw ConfigError("batch sizes must be >= 0");
  if (step_size_target <= 0.0 || step_size_explore <= 0.0)
    throw ConfigError("step sizes must be positive");
  if (gamma < 0.0 || gamma > 1.0) throw ConfigError("gamma must be in [0,1]");
  if (mixture_epsilon < 0.0 || mixture_epsilon > 1.0 || eps_start < 0.0 ||
      eps_start > 1.0 || eps_end < 0.0 || eps_end > 1.0)
    throw ConfigError("epsilon values must be in [0,1]");
  if (eval_episodes < 1) throw ConfigError("eval_episodes must be >= 1");
  if (matched_per_episode < 0) throw ConfigError("matched_per_episode must be >= 0");
  if (backward_passes < 0) throw ConfigError("backward_passes must be >= 0");
  if (parallel < 1) throw ConfigError("parallel must be >= 1");
  if (task == Task::kMatrixGame && matrix_actions > kMaxActions)
    throw ConfigError("matrix game training supports at most " +
                      std::to_string(kMaxActions) + " actions");
}

uint64_t RunConfig::effective_eval_interval() const {
  if (eval_interval > 0) return eval_interval;
  // One hundred evaluation points per run; budgets under one interval get
  // no evaluations at all.
  return total_env_steps / 100;
}

uint64_t RunConfig::effective_alpha_horizon() const {
  if (alpha_horizon > 0) return alpha_horizon;
  return std::max<uint64_t>(1, total_env_steps * 2 / 3);
}

TaskSpec RunConfig::task_spec() const {
  return make_task_spec(task, reward_mode, horizon, matrix_actions);
}

namespace {

uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw ConfigError("invalid integer for " + key + ": " + v);
  }
}

int to_int(const std::string& key, const std::string& v) {
  try {
    return std::stoi(v);
  } catch (const std::exception&) {
    throw ConfigError("invalid integer for " + key + ": " + v);
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    return std::stod(v);
  } catch (const std::exception&) {
    throw ConfigError("invalid number for " + key + ": " + v);
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<uint64_t> parse_seed_list(const std::string& text) {
  std::vector<uint64_t> seeds;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    part = trim(part);
    if (!part.empty()) seeds.push_back(to_u64("seeds", part));
  }
  if (seeds.empty()) throw ConfigError("empty seed list");
  return seeds;
}

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "task") cfg.task = task_from_string(value);
  else if (key == "reward_mode") cfg.reward_mode = reward_mode_from_string(value);
  else if (key == "algo") cfg.algo = algo_from_string(value);
  else if (key == "seeds") cfg.seeds = parse_seed_list(value);
  else if (key == "steps" || key == "total_env_steps") cfg.total_env_steps = to_u64(key, value);
  else if (key == "horizon") cfg.horizon = to_int(key, value);
  else if (key == "goal_period") cfg.goal_period = to_int(key, value);
  else if (key == "expand_period") cfg.expand_period = to_int(key, value);
  else if (key == "goal_batch") cfg.goal_batch = to_int(key, value);
  else if (key == "goal_recent_window") cfg.goal_recent_window = to_u64(key, value);
  else if (key == "goal_bonus") cfg.goal_bonus = to_double(key, value);
  else if (key == "max_space_dims") cfg.max_space_dims = to_int(key, value);
  else if (key == "match_mode") cfg.match_mode = goal_match_mode_from_string(value);
  else if (key == "alpha_horizon") cfg.alpha_horizon = to_u64(key, value);
  else if (key == "mixture_epsilon") cfg.mixture_epsilon = to_double(key, value);
  else if (key == "mixture_per_episode")
    cfg.mixture_per_episode = value == "1" || value == "true";
  else if (key == "eps_start") cfg.eps_start = to_double(key, value);
  else if (key == "eps_end") cfg.eps_end = to_double(key, value);
  else if (key == "eps_anneal_steps") cfg.eps_anneal_steps = to_u64(key, value);
  else if (key == "bonus_beta") cfg.bonus_beta = to_double(key, value);
  else if (key == "replay_capacity") cfg.replay_capacity = to_u64(key, value);
  else if (key == "target_batch") cfg.target_batch = to_int(key, value);
  else if (key == "explore_batch") cfg.explore_batch = to_int(key, value);
  else if (key == "step_size_target") cfg.step_size_target = to_double(key, value);
  else if (key == "step_size_explore") cfg.step_size_explore = to_double(key, value);
  else if (key == "gamma") cfg.gamma = to_double(key, value);
  else if (key == "matched_scan_window") cfg.matched_scan_window = to_u64(key, value);
  else if (key == "matched_per_episode") cfg.matched_per_episode = to_int(key, value);
  else if (key == "backward_passes") cfg.backward_passes = to_int(key, value);
  else if (key == "exp_sweep_window") cfg.exp_sweep_window = to_u64(key, value);
  else if (key == "dp_passes") cfg.dp_passes = to_int(key, value);
  else if (key == "reset_explore_on_goal")
    cfg.reset_explore_on_goal = value == "1" || value == "true";
  else if (key == "explore_goal_terminal")
    cfg.explore_goal_terminal = value == "1" || value == "true";
  else if (key == "eval_interval") cfg.eval_interval = to_u64(key, value);
  else if (key == "eval_episodes") cfg.eval_episodes = to_int(key, value);
  else if (key == "snapshot_interval") cfg.snapshot_interval = to_int(key, value);
  else if (key == "matrix_actions") cfg.matrix_actions = to_int(key, value);
  else if (key == "out") cfg.out_dir = value;
  else if (key == "parallel") cfg.parallel = to_int(key, value);
  else throw ConfigError("unknown config key: " + key);
}

RunConfig parse_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key=value");
    apply_config_entry(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

}  // namespace cmae
