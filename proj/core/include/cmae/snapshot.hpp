#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cmae/learner.hpp"
#include "cmae/spacetree.hpp"

namespace cmae {

// Q-table snapshots: one file per policy set, entries sorted by state key so
// identical tables serialize to identical bytes.
void save_qtables(const std::string& path, std::span<const QTable> tables);
std::vector<QTable> load_qtables(const std::string& path);

// Tree visitation counters, written at the end of a run and decoded by the
// visit-dump tool.
void save_counters(const std::string& path, const SpaceTree& tree);

struct CounterDump {
  std::vector<int> cardinalities;
  struct Node {
    IndexSet k;
    std::vector<std::pair<uint64_t, uint64_t>> entries;  // packed key, count
  };
  std::vector<Node> nodes;
};

CounterDump load_counters(const std::string& path);

}  // namespace cmae
