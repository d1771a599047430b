#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cmae/learner.hpp"
#include "cmae/replay.hpp"
#include "cmae/spacetree.hpp"

namespace cmae {

// How a transition is matched against the shared goal: by the goal's
// restricted projection (default) or by full-state equality.
enum class GoalMatchMode { kRestricted, kFull };

GoalMatchMode goal_match_mode_from_string(const std::string& name);
std::string to_string(GoalMatchMode mode);

// A shared exploration goal: a stored state, the restricted space it was
// chosen in, and its projected key under that space.
struct Goal {
  EnvState full_state;
  IndexSet k;
  uint64_t key = 0;
  double bonus = 1.0;          // reward added on reaching the goal
  uint64_t source_index = 0;   // replay global index the goal came from
};

// Samples a restricted space from the tree, draws `batch_size` stored states
// uniformly from the replay buffer, and returns the one whose projected
// visit count is smallest (ties uniform at random). Empty replay yields
// nullopt; callers keep their previous goal. A nonzero `recent_window`
// restricts the batch to the newest records, which keeps goals tracking the
// exploration frontier once the buffer dwarfs an episode.
std::optional<Goal> select_goal(const SpaceTree& tree, const ReplayBuffer& replay,
                                Rng& rng, int batch_size, double bonus,
                                uint64_t recent_window = 0);

bool goal_matches(const Goal& goal, const SpaceTree& tree, const EnvState& state,
                  GoalMatchMode mode);

// Copy of `batch` with +goal.bonus on every transition whose source state
// matches the goal; the input batch is not mutated. Without a goal the copy
// is verbatim.
std::vector<TransitionRecord> reshape_rewards(std::span<const TransitionRecord> batch,
                                              const std::optional<Goal>& goal,
                                              const SpaceTree& tree, GoalMatchMode mode);

// One reshaped Q-learning backup on every exploration policy. Target tables
// are never touched by anything in this module. With `goal_terminal` a
// matched transition is treated as ending the pursuit: the backup takes the
// bonus without bootstrapping, which caps goal values at the bonus itself
// instead of the recurrent bonus/(1-gamma) and keeps chains to different
// goals comparable in magnitude.
void exploration_update(std::span<QTable> policies, const StatePacker& packer,
                        const TransitionRecord& t, const std::optional<Goal>& goal,
                        const SpaceTree& tree, GoalMatchMode mode,
                        bool goal_terminal = true);

// Assignment form of the reshaped backup: Bellman targets are written
// directly instead of being blended by the step size. On the deterministic
// tasks, newest-first sweeps of these backups rebuild exact goal-distance
// values along every stored trajectory.
void exploration_dp_backup(std::span<QTable> policies, const StatePacker& packer,
                           const TransitionRecord& t, const std::optional<Goal>& goal,
                           const SpaceTree& tree, GoalMatchMode mode,
                           bool goal_terminal = true);

// One pass of reshaped Q-learning over a uniformly sampled batch for each
// exploration policy.
void train_exploration(std::span<QTable> policies, const StatePacker& packer,
                       const ReplayBuffer& replay, const std::optional<Goal>& goal,
                       const SpaceTree& tree, GoalMatchMode mode, Rng& rng,
                       int batch_size, bool goal_terminal = true);

}  // namespace cmae
