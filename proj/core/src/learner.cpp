#include "cmae/learner.hpp"

#include <cmath>

#include "cmae/error.hpp"

namespace cmae {

// --- FlatQMap ---

const FlatQMap::Values* FlatQMap::find(uint64_t key) const {
  size_t i = splitmix64(key) & mask_;
  while (keys_[i] != kEmpty) {
    if (keys_[i] == key) return &vals_[i];
    i = (i + 1) & mask_;
  }
  return nullptr;
}

FlatQMap::Values& FlatQMap::get_or_insert(uint64_t key) {
  if (key == kEmpty) throw ContractViolation("FlatQMap: reserved key");
  if ((count_ + 1) * 10 > (mask_ + 1) * 7) rehash((mask_ + 1) * 2);
  size_t i = splitmix64(key) & mask_;
  while (keys_[i] != kEmpty) {
    if (keys_[i] == key) return vals_[i];
    i = (i + 1) & mask_;
  }
  keys_[i] = key;
  vals_[i] = Values{};
  ++count_;
  return vals_[i];
}

void FlatQMap::rehash(size_t new_cap) {
  std::vector<uint64_t> old_keys = std::move(keys_);
  std::vector<Values> old_vals = std::move(vals_);
  keys_.assign(new_cap, kEmpty);
  vals_.assign(new_cap, Values{});
  mask_ = new_cap - 1;
  count_ = 0;
  for (size_t i = 0; i < old_keys.size(); ++i) {
    if (old_keys[i] == kEmpty) continue;
    size_t j = splitmix64(old_keys[i]) & mask_;
    while (keys_[j] != kEmpty) j = (j + 1) & mask_;
    keys_[j] = old_keys[i];
    vals_[j] = old_vals[i];
    ++count_;
  }
}

void FlatQMap::for_each(const std::function<void(uint64_t, const Values&)>& fn) const {
  for (size_t i = 0; i <= mask_; ++i)
    if (keys_[i] != kEmpty) fn(keys_[i], vals_[i]);
}

// --- QTable ---

QTable::QTable(int n_actions, double step_size, double gamma)
    : n_actions_(n_actions), step_size_(step_size), gamma_(gamma) {
  if (n_actions < 1 || n_actions > kMaxActions)
    throw ConfigError("QTable: unsupported action count");
  if (step_size <= 0.0) throw ConfigError("QTable: step size must be positive");
  if (gamma < 0.0 || gamma > 1.0) throw ConfigError("QTable: gamma must be in [0,1]");
}

double QTable::q(uint64_t key, int action) const {
  const auto* v = map_.find(key);
  return v ? (*v)[action] : 0.0;
}

double QTable::max_q(uint64_t key) const {
  const auto* v = map_.find(key);
  if (!v) return 0.0;
  float best = (*v)[0];
  for (int a = 1; a < n_actions_; ++a) best = std::max(best, (*v)[a]);
  return best;
}

int QTable::greedy_action(uint64_t key, Rng& rng) const {
  const auto* v = map_.find(key);
  if (!v) return static_cast<int>(rng.below(static_cast<uint64_t>(n_actions_)));
  float best = (*v)[0];
  for (int a = 1; a < n_actions_; ++a) best = std::max(best, (*v)[a]);
  int ties = 0;
  for (int a = 0; a < n_actions_; ++a)
    if ((*v)[a] == best) ++ties;
  uint64_t pick = rng.below(static_cast<uint64_t>(ties));
  for (int a = 0; a < n_actions_; ++a) {
    if ((*v)[a] != best) continue;
    if (pick == 0) return a;
    --pick;
  }
  return n_actions_ - 1;
}

void QTable::update(uint64_t key, int action, double reward, uint64_t next_key, bool done) {
  const double bootstrap = done ? 0.0 : gamma_ * max_q(next_key);
  auto& v = map_.get_or_insert(key);
  const double td = reward + bootstrap - v[action];
  v[action] = static_cast<float>(v[action] + step_size_ * td);
}

void QTable::assign(uint64_t key, int action, double reward, uint64_t next_key, bool done) {
  const double bootstrap = done ? 0.0 : gamma_ * max_q(next_key);
  map_.get_or_insert(key)[action] = static_cast<float>(reward + bootstrap);
}

void QTable::insert_raw(uint64_t key, const FlatQMap::Values& values) {
  map_.get_or_insert(key) = values;
}

void q_update(QTable& table, const StatePacker& packer, const TransitionRecord& t,
              int agent, std::optional<double> reward_override) {
  table.update(packer.pack(t.state), t.joint_action[agent],
               reward_override.value_or(t.reward), packer.pack(t.next_state), t.done);
}

// --- behavior policies ---

JointAction act_mixture(std::span<const QTable> exploration, std::span<const QTable> target,
                        uint64_t state_key, uint64_t t, const MixtureSchedule& schedule,
                        double epsilon, Rng& rng) {
  const double alpha = schedule.alpha(t);
  const auto& tables = rng.bernoulli(alpha) ? exploration : target;
  const double eps = epsilon * alpha;
  JointAction a;
  for (const QTable& table : tables) {
    if (eps > 0.0 && rng.bernoulli(eps))
      a.push_back(static_cast<int>(rng.below(static_cast<uint64_t>(table.n_actions()))));
    else
      a.push_back(table.greedy_action(state_key, rng));
  }
  return a;
}

JointAction act_epsilon_greedy(std::span<const QTable> tables, uint64_t state_key,
                               double epsilon, Rng& rng) {
  JointAction a;
  for (const QTable& table : tables) {
    if (epsilon > 0.0 && rng.bernoulli(epsilon))
      a.push_back(static_cast<int>(rng.below(static_cast<uint64_t>(table.n_actions()))));
    else
      a.push_back(table.greedy_action(state_key, rng));
  }
  return a;
}

double count_bonus_reward(const Counter& counter, uint64_t next_state_key, double beta) {
  uint64_t c = counter.count(next_state_key);
  if (c == 0) c = 1;
  return beta / std::sqrt(static_cast<double>(c));
}

}  // namespace cmae
