#pragma once

#include <cstdint>
#include <vector>

#include "cmae/rng.hpp"
#include "cmae/spacetree.hpp"
#include "cmae/types.hpp"

namespace cmae {

// Bounded FIFO transition store. Records are addressed by a monotone global
// index so references stay valid (and detectably stale) across eviction.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity);

  void push(TransitionRecord rec);

  size_t size() const { return data_.size(); }
  size_t capacity() const { return capacity_; }
  bool empty() const { return data_.empty(); }

  // Global index range currently held: [begin_index, end_index).
  uint64_t begin_index() const { return pushed_ - data_.size(); }
  uint64_t end_index() const { return pushed_; }

  const TransitionRecord& at_global(uint64_t global_index) const;

  uint64_t sample_index(Rng& rng) const;
  const TransitionRecord& sample(Rng& rng) const { return at_global(sample_index(rng)); }

  // Uniform over the newest `window` records (0 = whole buffer).
  uint64_t sample_index_recent(Rng& rng, uint64_t window) const;

  // Stored next-states, oldest first.
  void for_each_next_state(const StateVisitor& fn) const;
  // Adapter for SpaceTree::expand.
  StateSource state_source() const;

 private:
  size_t capacity_;
  std::vector<TransitionRecord> data_;
  size_t head_ = 0;       // physical slot of the oldest record once full
  uint64_t pushed_ = 0;   // total records ever pushed
};

}  // namespace cmae
