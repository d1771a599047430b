#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "cmae/counting.hpp"
#include "cmae/rng.hpp"
#include "cmae/types.hpp"

namespace cmae {

// Insert-only open-addressing map from packed state key to per-action value
// arrays. Missing keys read as all-zero. Iteration is over storage slots, so
// identical insertion histories give identical iteration order.
class FlatQMap {
 public:
  using Values = std::array<float, kMaxActions>;

  FlatQMap() { rehash(kInitialCap); }

  const Values* find(uint64_t key) const;
  Values& get_or_insert(uint64_t key);
  size_t size() const { return count_; }

  void for_each(const std::function<void(uint64_t, const Values&)>& fn) const;

 private:
  static constexpr size_t kInitialCap = 1024;
  static constexpr uint64_t kEmpty = ~0ull;

  void rehash(size_t new_cap);

  std::vector<uint64_t> keys_;
  std::vector<Values> vals_;
  size_t count_ = 0;
  size_t mask_ = 0;
};

// Tabular action-value function for one agent. Keys are packed full states;
// unvisited entries read as zero.
class QTable {
 public:
  QTable() = default;
  QTable(int n_actions, double step_size, double gamma);

  int n_actions() const { return n_actions_; }
  double step_size() const { return step_size_; }
  double gamma() const { return gamma_; }
  size_t size() const { return map_.size(); }

  double q(uint64_t key, int action) const;
  double max_q(uint64_t key) const;
  // Greedy action with uniform random tie-breaking.
  int greedy_action(uint64_t key, Rng& rng) const;

  // Q(s,a) += step * (r + gamma * max_a' Q(s',a') * (1-done) - Q(s,a))
  void update(uint64_t key, int action, double reward, uint64_t next_key, bool done);

  // Direct Bellman assignment Q(s,a) = r + gamma * max_a' Q(s',a') * (1-done).
  // Exact on deterministic transitions; used by the selection-time rebuild.
  void assign(uint64_t key, int action, double reward, uint64_t next_key, bool done);

  void insert_raw(uint64_t key, const FlatQMap::Values& values);
  void for_each(const std::function<void(uint64_t, const FlatQMap::Values&)>& fn) const {
    map_.for_each(fn);
  }

 private:
  FlatQMap map_;
  int n_actions_ = 0;
  double step_size_ = 0.1;
  double gamma_ = 0.95;
};

// One Q-learning backup from a stored transition for one agent's table.
// `reward_override` replaces the stored environment reward (reshaped goal
// bonuses, count-based bonuses).
void q_update(QTable& table, const StatePacker& packer, const TransitionRecord& t,
              int agent, std::optional<double> reward_override = std::nullopt);

// Behavior-policy mixing weight: alpha(t) = max(0, start * (1 - t/horizon)).
struct MixtureSchedule {
  double alpha_start = 1.0;
  uint64_t horizon = 1;

  double alpha(uint64_t t) const {
    if (t >= horizon) return 0.0;
    return alpha_start * (1.0 - static_cast<double>(t) / static_cast<double>(horizon));
  }
};

// With probability alpha(t) every agent acts greedily on its exploration
// table, otherwise on its target table (one draw for the whole team). On top
// of the chosen policy each agent independently takes a uniform random
// action with probability epsilon * alpha(t).
JointAction act_mixture(std::span<const QTable> exploration, std::span<const QTable> target,
                        uint64_t state_key, uint64_t t, const MixtureSchedule& schedule,
                        double epsilon, Rng& rng);

// Per-agent epsilon-greedy on the given tables.
JointAction act_epsilon_greedy(std::span<const QTable> tables, uint64_t state_key,
                               double epsilon, Rng& rng);

// Count-based exploration bonus beta / sqrt(count); an unseen state counts
// as seen once.
double count_bonus_reward(const Counter& counter, uint64_t next_state_key, double beta);

}  // namespace cmae
