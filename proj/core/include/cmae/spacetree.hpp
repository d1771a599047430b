#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cmae/counting.hpp"
#include "cmae/rng.hpp"
#include "cmae/types.hpp"

namespace cmae {

using StateVisitor = std::function<void(const EnvState&)>;
// Replays a stream of states into a visitor (typically the replay buffer's
// stored next-states, oldest first).
using StateSource = std::function<void(const StateVisitor&)>;

// Sorted set of distinct state-component indices identifying a restricted
// space: the projection of the full state onto those components.
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(std::initializer_list<int> indices);
  static IndexSet from(const std::vector<int>& indices);

  int size() const { return n_; }
  int operator[](int i) const { return idx_[i]; }
  bool contains(int e) const;
  // Superset with one more element; e must not already be present.
  IndexSet with(int e) const;

  bool operator==(const IndexSet& o) const;
  bool operator<(const IndexSet& o) const;

  std::string to_string() const;  // "0,2,5"
  static IndexSet parse(const std::string& text);

 private:
  void insert_sorted(int e);
  std::array<uint8_t, kMaxStateDim> idx_{};
  int8_t n_ = 0;
};

struct SpaceNode {
  IndexSet k;
  Counter counter;
  bool expanded = false;
  std::vector<int> children;  // node ids of the (|k|+1)-dimensional supersets
};

// Tree of restricted spaces grown bottom-up from the single-component
// spaces. Every node carries a visitation counter over projected states; the
// per-node utility is minus the normalized entropy of that counter, so
// concentrated (under-explored) spaces are preferred when sampling.
class SpaceTree {
 public:
  SpaceTree() = default;
  // `cardinalities` gives each state component's domain size; `max_dims`
  // caps how many components a restricted space may combine.
  SpaceTree(std::vector<int> cardinalities, int max_dims = 3);

  int dims() const { return static_cast<int>(cards_.size()); }
  const std::vector<int>& cardinalities() const { return cards_; }
  int max_dims() const { return max_dims_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  const SpaceNode& node(int id) const { return nodes_[id]; }
  int find(const IndexSet& k) const;  // node id, -1 when absent

  // Packed projection of a state onto the components in k.
  uint64_t project_key(const EnvState& state, const IndexSet& k) const;
  // Key of an already-projected component vector (must match k's layout).
  uint64_t key_for_components(const std::vector<int>& comps, const IndexSet& k) const;
  std::vector<int> unpack_key(uint64_t key, const IndexSet& k) const;

  // Records one observed state in every node's counter.
  void update_all(const EnvState& state);

  // Visitation entropy of the node divided by log of its observed support.
  // Support 1 yields +infinity; an empty counter is an error.
  double normalized_entropy(int id) const;
  // -normalized_entropy; -infinity means zero sampling weight.
  double utility(int id) const;

  // Draws a node id from the softmax over finite utilities. Nodes with
  // -infinity utility (or no data) get probability exactly zero; when no
  // node qualifies, falls back to a uniform draw over the single-component
  // nodes.
  int sample_space(Rng& rng) const;

  // Adds every (|k|+1)-dimensional superset of k_star not yet in the tree,
  // with counters initialized by one pass over `states`. No-op when k_star
  // is already max_dims- or dims-dimensional. Returns the number of nodes
  // added; safe to call repeatedly.
  int expand(const IndexSet& k_star, const StateSource& states);

  // One line per node: index set, support, total, eta, utility, expanded.
  void export_summary(std::ostream& os) const;

 private:
  uint64_t key_bound(const IndexSet& k) const;
  int add_node(const IndexSet& k);

  std::vector<int> cards_;
  int max_dims_ = 3;
  std::vector<SpaceNode> nodes_;
  std::map<IndexSet, int> by_set_;
};

}  // namespace cmae
