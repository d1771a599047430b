#include "cmae/counting.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <ostream>

#include "cmae/rng.hpp"

namespace cmae {

namespace {

constexpr uint64_t kXlogxTableSize = 1ull << 20;

const double* xlogx_table() {
  static std::vector<double>* table = [] {
    auto* t = new std::vector<double>(kXlogxTableSize);
    (*t)[0] = 0.0;
    for (uint64_t c = 1; c < kXlogxTableSize; ++c)
      (*t)[c] = static_cast<double>(c) * std::log(static_cast<double>(c));
    return t;
  }();
  return table->data();
}

}  // namespace

double xlogx(uint64_t c) {
  if (c < kXlogxTableSize) return xlogx_table()[c];
  return static_cast<double>(c) * std::log(static_cast<double>(c));
}

void Counter::increment(uint64_t key) {
  uint64_t c;
  if (!dense_.empty()) {
    c = dense_[key];
    dense_[key] = static_cast<uint32_t>(c + 1);
  } else {
    c = sparse_[key]++;
  }
  if (c == 0) ++support_;
  sum_c_ln_c_ += xlogx(c + 1) - xlogx(c);
  ++total_;
}

uint64_t Counter::count(uint64_t key) const {
  if (!dense_.empty()) return key < dense_.size() ? dense_[key] : 0;
  auto it = sparse_.find(key);
  return it == sparse_.end() ? 0 : it->second;
}

double Counter::probability(uint64_t key) const {
  if (total_ == 0)
    throw UndefinedDistribution("Counter::probability: no observations");
  return static_cast<double>(count(key)) / static_cast<double>(total_);
}

double Counter::entropy_nats() const {
  if (total_ == 0)
    throw UndefinedDistribution("Counter::entropy_nats: no observations");
  double h = std::log(static_cast<double>(total_)) - sum_c_ln_c_ / static_cast<double>(total_);
  return std::max(h, 0.0);
}

void Counter::for_each(const std::function<void(uint64_t, uint64_t)>& fn) const {
  if (!dense_.empty()) {
    for (uint64_t k = 0; k < dense_.size(); ++k)
      if (dense_[k] > 0) fn(k, dense_[k]);
    return;
  }
  std::vector<std::pair<uint64_t, uint64_t>> entries(sparse_.begin(), sparse_.end());
  std::sort(entries.begin(), entries.end());
  for (const auto& [k, c] : entries) fn(k, c);
}

void Counter::serialize(std::ostream& os) const {
  for_each([&os](uint64_t key, uint64_t count) { os << key << '\t' << count << '\n'; });
}

HashDiscretizer::HashDiscretizer(std::vector<double> bin_widths, uint64_t salt)
    : widths_(std::move(bin_widths)), salt_(salt) {
  for (double w : widths_)
    if (!(w > 0.0)) throw ContractViolation("HashDiscretizer: bin widths must be positive");
}

uint64_t HashDiscretizer::discretize(std::span<const double> components) const {
  if (components.size() != widths_.size())
    throw ContractViolation("HashDiscretizer: component count mismatch");
  uint64_t h = splitmix64(salt_);
  for (size_t i = 0; i < components.size(); ++i) {
    if (!std::isfinite(components[i]))
      throw ContractViolation("HashDiscretizer: non-finite component rejected");
    const auto bin = static_cast<int64_t>(std::floor(components[i] / widths_[i]));
    h = splitmix64(h ^ static_cast<uint64_t>(bin));
  }
  return h;
}

}  // namespace cmae
