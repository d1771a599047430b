#include "cmae/explore.hpp"

#include "cmae/error.hpp"

namespace cmae {

GoalMatchMode goal_match_mode_from_string(const std::string& name) {
  if (name == "restricted") return GoalMatchMode::kRestricted;
  if (name == "full") return GoalMatchMode::kFull;
  throw ConfigError("unknown goal match mode: " + name);
}

std::string to_string(GoalMatchMode mode) {
  return mode == GoalMatchMode::kRestricted ? "restricted" : "full";
}

std::optional<Goal> select_goal(const SpaceTree& tree, const ReplayBuffer& replay,
                                Rng& rng, int batch_size, double bonus,
                                uint64_t recent_window) {
  if (replay.empty()) return std::nullopt;
  const int node_id = tree.sample_space(rng);
  const SpaceNode& node = tree.node(node_id);

  Goal goal;
  goal.k = node.k;
  goal.bonus = bonus;
  uint64_t best_count = ~0ull;
  uint64_t ties = 0;
  for (int i = 0; i < batch_size; ++i) {
    const uint64_t gidx = replay.sample_index_recent(rng, recent_window);
    const EnvState& s = replay.at_global(gidx).next_state;
    const uint64_t key = tree.project_key(s, node.k);
    const uint64_t count = node.counter.count(key);
    if (count < best_count) {
      best_count = count;
      ties = 1;
      goal.full_state = s;
      goal.key = key;
      goal.source_index = gidx;
    } else if (count == best_count) {
      // Reservoir pick: keep each minimizer with probability 1/ties.
      ++ties;
      if (rng.below(ties) == 0) {
        goal.full_state = s;
        goal.key = key;
        goal.source_index = gidx;
      }
    }
  }
  return goal;
}

bool goal_matches(const Goal& goal, const SpaceTree& tree, const EnvState& state,
                  GoalMatchMode mode) {
  if (mode == GoalMatchMode::kFull) return state == goal.full_state;
  return tree.project_key(state, goal.k) == goal.key;
}

std::vector<TransitionRecord> reshape_rewards(std::span<const TransitionRecord> batch,
                                              const std::optional<Goal>& goal,
                                              const SpaceTree& tree, GoalMatchMode mode) {
  std::vector<TransitionRecord> out(batch.begin(), batch.end());
  if (!goal) return out;
  for (auto& t : out)
    if (goal_matches(*goal, tree, t.state, mode)) t.reward += goal->bonus;
  return out;
}

void exploration_update(std::span<QTable> policies, const StatePacker& packer,
                        const TransitionRecord& t, const std::optional<Goal>& goal,
                        const SpaceTree& tree, GoalMatchMode mode,
                        bool goal_terminal) {
  const bool matched = goal && goal_matches(*goal, tree, t.state, mode);
  if (matched && goal_terminal) {
    const uint64_t key = packer.pack(t.state);
    for (int agent = 0; agent < static_cast<int>(policies.size()); ++agent)
      policies[agent].update(key, t.joint_action[agent], t.reward + goal->bonus,
                             /*next_key=*/0, /*done=*/true);
    return;
  }
  std::optional<double> override;
  if (matched) override = t.reward + goal->bonus;
  for (int agent = 0; agent < static_cast<int>(policies.size()); ++agent)
    q_update(policies[agent], packer, t, agent, override);
}

void exploration_dp_backup(std::span<QTable> policies, const StatePacker& packer,
                           const TransitionRecord& t, const std::optional<Goal>& goal,
                           const SpaceTree& tree, GoalMatchMode mode,
                           bool goal_terminal) {
  const bool matched = goal && goal_matches(*goal, tree, t.state, mode);
  const uint64_t key = packer.pack(t.state);
  const uint64_t next_key = packer.pack(t.next_state);
  for (int agent = 0; agent < static_cast<int>(policies.size()); ++agent) {
    if (matched)
      policies[agent].assign(key, t.joint_action[agent],
                             t.reward + (goal ? goal->bonus : 0.0), next_key,
                             goal_terminal ? true : t.done);
    else
      policies[agent].assign(key, t.joint_action[agent], t.reward, next_key, t.done);
  }
}

void train_exploration(std::span<QTable> policies, const StatePacker& packer,
                       const ReplayBuffer& replay, const std::optional<Goal>& goal,
                       const SpaceTree& tree, GoalMatchMode mode, Rng& rng,
                       int batch_size, bool goal_terminal) {
  if (replay.empty()) return;
  for (int i = 0; i < batch_size; ++i)
    exploration_update(policies, packer, replay.sample(rng), goal, tree, mode,
                       goal_terminal);
}

}  // namespace cmae
