#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "cmae/error.hpp"

namespace cmae {

// Visitation counter over restricted-state keys.
//
// Small bounded key domains (grid projections) use a dense array; unbounded
// domains (hashed keys) fall back to a hash map. Alongside the raw counts the
// counter maintains total and sum of c*ln(c), so the entropy of the induced
// empirical distribution is available in O(1):
//   H = ln(total) - sum_c_ln_c / total.
class Counter {
 public:
  // Dense storage when the caller knows keys lie in [0, key_bound) and the
  // bound is small enough; otherwise sparse.
  static constexpr uint64_t kDenseLimit = 1ull << 24;

  Counter() = default;
  explicit Counter(uint64_t key_bound) {
    if (key_bound > 0 && key_bound <= kDenseLimit) dense_.assign(key_bound, 0);
  }

  void increment(uint64_t key);

  uint64_t count(uint64_t key) const;
  uint64_t total() const { return total_; }
  uint64_t support_size() const { return support_; }

  // count(key) / total. Throws UndefinedDistribution when nothing was counted.
  double probability(uint64_t key) const;

  // Shannon entropy (nats) of the visitation distribution. 0 for support 1.
  double entropy_nats() const;

  bool is_dense() const { return !dense_.empty(); }

  // Visits (key, count) pairs with count > 0 in ascending key order.
  void for_each(const std::function<void(uint64_t, uint64_t)>& fn) const;

  // Two-column text export: "<key>\t<count>" per line, ascending key.
  void serialize(std::ostream& os) const;

 private:
  std::vector<uint32_t> dense_;
  std::unordered_map<uint64_t, uint64_t> sparse_;
  uint64_t total_ = 0;
  uint64_t support_ = 0;
  double sum_c_ln_c_ = 0.0;
};

// x * ln(x) with a precomputed table for small integer arguments; the table
// keeps per-step counter updates free of log() calls.
double xlogx(uint64_t c);

// Discretizer for continuous components: floors each component by its bin
// width, then mixes the integer bin vector through a salted 64-bit hash.
// Same input and salt always produce the same key, across runs.
class HashDiscretizer {
 public:
  HashDiscretizer(std::vector<double> bin_widths, uint64_t salt);

  uint64_t discretize(std::span<const double> components) const;

  const std::vector<double>& bin_widths() const { return widths_; }
  uint64_t salt() const { return salt_; }

 private:
  std::vector<double> widths_;
  uint64_t salt_;
};

}  // namespace cmae
