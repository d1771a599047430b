#include "cmae/replay.hpp"

#include "cmae/error.hpp"

namespace cmae {

ReplayBuffer::ReplayBuffer(size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("ReplayBuffer: capacity must be >= 1");
}

void ReplayBuffer::push(TransitionRecord rec) {
  if (data_.size() < capacity_) {
    data_.push_back(std::move(rec));
  } else {
    data_[head_] = std::move(rec);
    head_ = (head_ + 1) % capacity_;
  }
  ++pushed_;
}

const TransitionRecord& ReplayBuffer::at_global(uint64_t global_index) const {
  if (global_index < begin_index() || global_index >= end_index())
    throw ContractViolation("ReplayBuffer: global index out of range");
  const uint64_t offset = global_index - begin_index();
  const size_t physical =
      data_.size() < capacity_ ? offset : (head_ + offset) % capacity_;
  return data_[physical];
}

uint64_t ReplayBuffer::sample_index(Rng& rng) const {
  if (data_.empty()) throw ContractViolation("ReplayBuffer: sample from empty buffer");
  return begin_index() + rng.below(data_.size());
}

uint64_t ReplayBuffer::sample_index_recent(Rng& rng, uint64_t window) const {
  if (data_.empty()) throw ContractViolation("ReplayBuffer: sample from empty buffer");
  if (window == 0 || window >= data_.size()) return sample_index(rng);
  return end_index() - window + rng.below(window);
}

void ReplayBuffer::for_each_next_state(const StateVisitor& fn) const {
  for (uint64_t g = begin_index(); g < end_index(); ++g) fn(at_global(g).next_state);
}

StateSource ReplayBuffer::state_source() const {
  return [this](const StateVisitor& fn) { for_each_next_state(fn); };
}

}  // namespace cmae
