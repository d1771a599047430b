#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cmae/rng.hpp"
#include "cmae/types.hpp"

namespace cmae {

enum class Task { kPass, kSecretRoom, kPushBox, kIsland, kMatrixGame };
enum class RewardMode { kSparse, kDense };

Task task_from_string(const std::string& name);
std::string to_string(Task task);
RewardMode reward_mode_from_string(const std::string& name);
std::string to_string(RewardMode mode);

struct TaskSpec {
  Task name = Task::kPass;
  RewardMode reward_mode = RewardMode::kSparse;
  int grid_size = 0;
  int n_agents = 2;
  int horizon = 300;
  int state_dim = 0;
  int action_count = 5;
};

// Canonical spec for a task. `matrix_actions` sizes the matrix game only.
TaskSpec make_task_spec(Task task, RewardMode mode, int horizon = 300,
                        int matrix_actions = 3);

// Domain size of each state component, in state order. Grid coordinates have
// cardinality grid_size, door flags 2, energy levels max+1.
std::vector<int> component_cardinalities(const TaskSpec& spec);

// Collective payoff matrix of the cooperative two-player matrix game.
struct PayoffTable {
  int actions = 0;
  std::vector<double> values;  // row-major [a1][a2]

  double at(int a1, int a2) const;
  double max_value() const;
  // True when payoff depends only on agent one's action (constant rows).
  bool rows_constant() const;

  static PayoffTable identity(int l);
  static PayoffTable uniform_random(int l, uint64_t seed);
  // Payoff v[a1] for every a2.
  static PayoffTable row_constant(const std::vector<double>& row_values);
};

// U[a1][a2] for a two-agent joint action.
double matrix_payoff(const JointAction& actions, const PayoffTable& table);

struct StepResult {
  EnvState state;
  JointObs obs;
  double reward = 0.0;
  bool done = false;
};

// A task instance. Single-threaded episode state machine: reset() starts an
// episode, step() advances it. Identical seed and action sequence replay the
// exact same trajectory.
class Env {
 public:
  explicit Env(TaskSpec spec) : spec_(spec) {}
  virtual ~Env() = default;

  const TaskSpec& spec() const { return spec_; }

  std::pair<EnvState, JointObs> reset(uint64_t seed);

  // Applies one joint action. Illegal moves are no-ops, never errors. Done
  // turns true on the first step where the task's solved predicate holds or
  // when the horizon is exhausted.
  StepResult step(const JointAction& action);

  bool solved() const { return solved_; }
  int steps_taken() const { return t_; }
  const EnvState& state() const { return state_; }

 protected:
  virtual EnvState initial_state(Rng& rng) = 0;
  // Advances internal state by one joint action, returns the step reward and
  // sets solved_ when the task's predicate first holds.
  virtual double advance(const JointAction& action) = 0;

  TaskSpec spec_;
  EnvState state_;
  bool solved_ = false;
  bool episode_done_ = false;
  int t_ = 0;
  Rng rng_{0};
};

std::unique_ptr<Env> make_env(const TaskSpec& spec);
std::unique_ptr<Env> make_matrix_env(const PayoffTable& payoff, RewardMode mode);

}  // namespace cmae
