#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "cmae/error.hpp"

namespace cmae {

inline constexpr int kMaxStateDim = 12;
inline constexpr int kMaxAgents = 4;
inline constexpr int kMaxActions = 6;

// Full environment state: a short fixed-dimension vector of small integers
// (grid coordinates, door flags, energy levels, box coordinates). Inline
// storage keeps replay records allocation-free.
class EnvState {
 public:
  EnvState() = default;
  EnvState(std::initializer_list<int> comps) {
    for (int c : comps) push_back(c);
  }

  static EnvState from(const std::vector<int>& comps) {
    EnvState s;
    for (int c : comps) s.push_back(c);
    return s;
  }

  void push_back(int v) {
    if (size_ >= kMaxStateDim) throw ContractViolation("EnvState: dimension overflow");
    comps_[size_++] = static_cast<int16_t>(v);
  }

  int size() const { return size_; }
  int operator[](int i) const { return comps_[i]; }
  void set(int i, int v) { comps_[i] = static_cast<int16_t>(v); }

  bool operator==(const EnvState& o) const {
    if (size_ != o.size_) return false;
    for (int i = 0; i < size_; ++i)
      if (comps_[i] != o.comps_[i]) return false;
    return true;
  }
  bool operator!=(const EnvState& o) const { return !(*this == o); }

  std::vector<int> to_vector() const {
    return std::vector<int>(comps_.begin(), comps_.begin() + size_);
  }

  std::string to_string() const {
    std::string out;
    for (int i = 0; i < size_; ++i) {
      if (i) out += ',';
      out += std::to_string(comps_[i]);
    }
    return out;
  }

 private:
  std::array<int16_t, kMaxStateDim> comps_{};
  int8_t size_ = 0;
};

// One discrete action index per agent.
class JointAction {
 public:
  JointAction() = default;
  JointAction(std::initializer_list<int> acts) {
    for (int a : acts) push_back(a);
  }

  void push_back(int a) {
    if (size_ >= kMaxAgents) throw ContractViolation("JointAction: agent overflow");
    acts_[size_++] = static_cast<uint8_t>(a);
  }

  int size() const { return size_; }
  int operator[](int i) const { return acts_[i]; }
  void set(int i, int a) { acts_[i] = static_cast<uint8_t>(a); }

  bool operator==(const JointAction& o) const {
    if (size_ != o.size_) return false;
    for (int i = 0; i < size_; ++i)
      if (acts_[i] != o.acts_[i]) return false;
    return true;
  }

 private:
  std::array<uint8_t, kMaxAgents> acts_{};
  int8_t size_ = 0;
};

// Per-agent observation vectors. The discrete tasks expose the full state to
// every agent, so each entry is an EnvState-shaped vector.
class JointObs {
 public:
  JointObs() = default;

  static JointObs full_state(const EnvState& s, int n_agents) {
    JointObs o;
    o.n_ = static_cast<int8_t>(n_agents);
    for (int i = 0; i < n_agents; ++i) o.obs_[i] = s;
    return o;
  }

  int size() const { return n_; }
  const EnvState& operator[](int i) const { return obs_[i]; }

 private:
  std::array<EnvState, kMaxAgents> obs_{};
  int8_t n_ = 0;
};

// One environment interaction, as stored in the replay buffer.
// `bonus` is the count-based intrinsic reward snapshot used by the bonus
// baseline; the environment reward itself stays raw.
struct TransitionRecord {
  EnvState state;
  JointObs joint_obs;
  JointAction joint_action;
  EnvState next_state;
  JointObs next_joint_obs;
  double reward = 0.0;
  bool done = false;
  int32_t step_index = 0;
  float bonus = 0.0f;
};

// Mixed-radix packing of a component vector with known per-component
// cardinalities into one integer key. Injective for in-range components.
class StatePacker {
 public:
  StatePacker() = default;
  explicit StatePacker(std::vector<int> cardinalities)
      : cards_(std::move(cardinalities)) {
    uint64_t prod = 1;
    for (int c : cards_) {
      if (c <= 0) throw ContractViolation("StatePacker: cardinality must be positive");
      prod *= static_cast<uint64_t>(c);
    }
    domain_ = prod;
  }

  int dims() const { return static_cast<int>(cards_.size()); }
  uint64_t domain_size() const { return domain_; }
  const std::vector<int>& cardinalities() const { return cards_; }

  uint64_t pack(const EnvState& s) const {
    uint64_t key = 0;
    for (int i = 0; i < s.size(); ++i)
      key = key * static_cast<uint64_t>(cards_[i]) + static_cast<uint64_t>(s[i]);
    return key;
  }

  std::vector<int> unpack(uint64_t key) const {
    std::vector<int> comps(cards_.size());
    for (int i = static_cast<int>(cards_.size()) - 1; i >= 0; --i) {
      comps[i] = static_cast<int>(key % static_cast<uint64_t>(cards_[i]));
      key /= static_cast<uint64_t>(cards_[i]);
    }
    return comps;
  }

 private:
  std::vector<int> cards_;
  uint64_t domain_ = 1;
};

}  // namespace cmae
