#include "cmae/spacetree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "cmae/error.hpp"

namespace cmae {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// --- IndexSet ---

IndexSet::IndexSet(std::initializer_list<int> indices) {
  for (int e : indices) insert_sorted(e);
}

IndexSet IndexSet::from(const std::vector<int>& indices) {
  IndexSet k;
  for (int e : indices) k.insert_sorted(e);
  return k;
}

void IndexSet::insert_sorted(int e) {
  if (e < 0 || e >= kMaxStateDim) throw ContractViolation("IndexSet: index out of range");
  if (n_ >= kMaxStateDim) throw ContractViolation("IndexSet: overflow");
  int pos = 0;
  while (pos < n_ && idx_[pos] < e) ++pos;
  if (pos < n_ && idx_[pos] == e) throw ContractViolation("IndexSet: duplicate index");
  for (int i = n_; i > pos; --i) idx_[i] = idx_[i - 1];
  idx_[pos] = static_cast<uint8_t>(e);
  ++n_;
}

bool IndexSet::contains(int e) const {
  for (int i = 0; i < n_; ++i)
    if (idx_[i] == e) return true;
  return false;
}

IndexSet IndexSet::with(int e) const {
  IndexSet k = *this;
  k.insert_sorted(e);
  return k;
}

bool IndexSet::operator==(const IndexSet& o) const {
  if (n_ != o.n_) return false;
  for (int i = 0; i < n_; ++i)
    if (idx_[i] != o.idx_[i]) return false;
  return true;
}

bool IndexSet::operator<(const IndexSet& o) const {
  if (n_ != o.n_) return n_ < o.n_;
  for (int i = 0; i < n_; ++i)
    if (idx_[i] != o.idx_[i]) return idx_[i] < o.idx_[i];
  return false;
}

std::string IndexSet::to_string() const {
  std::string out;
  for (int i = 0; i < n_; ++i) {
    if (i) out += ',';
    out += std::to_string(idx_[i]);
  }
  return out;
}

IndexSet IndexSet::parse(const std::string& text) {
  IndexSet k;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ','))
    if (!part.empty()) k.insert_sorted(std::stoi(part));
  return k;
}

// --- SpaceTree ---

SpaceTree::SpaceTree(std::vector<int> cardinalities, int max_dims)
    : cards_(std::move(cardinalities)), max_dims_(max_dims) {
  if (cards_.empty()) throw ConfigError("SpaceTree: state dimension must be >= 1");
  if (static_cast<int>(cards_.size()) > kMaxStateDim)
    throw ConfigError("SpaceTree: state dimension too large");
  if (max_dims_ < 1) throw ConfigError("SpaceTree: max_dims must be >= 1");
  for (int c : cards_)
    if (c < 1) throw ConfigError("SpaceTree: cardinalities must be positive");
  for (int e = 0; e < dims(); ++e) add_node(IndexSet{e});
}

int SpaceTree::find(const IndexSet& k) const {
  auto it = by_set_.find(k);
  return it == by_set_.end() ? -1 : it->second;
}

uint64_t SpaceTree::key_bound(const IndexSet& k) const {
  uint64_t bound = 1;
  for (int i = 0; i < k.size(); ++i) bound *= static_cast<uint64_t>(cards_[k[i]]);
  return bound;
}

int SpaceTree::add_node(const IndexSet& k) {
  SpaceNode node;
  node.k = k;
  node.counter = Counter(key_bound(k));
  nodes_.push_back(std::move(node));
  const int id = static_cast<int>(nodes_.size()) - 1;
  by_set_.emplace(k, id);
  return id;
}

uint64_t SpaceTree::project_key(const EnvState& state, const IndexSet& k) const {
  uint64_t key = 0;
  for (int i = 0; i < k.size(); ++i) {
    const int e = k[i];
    if (e >= state.size() || e >= dims())
      throw ContractViolation("SpaceTree::project_key: component index out of range");
    key = key * static_cast<uint64_t>(cards_[e]) + static_cast<uint64_t>(state[e]);
  }
  return key;
}

uint64_t SpaceTree::key_for_components(const std::vector<int>& comps, const IndexSet& k) const {
  if (static_cast<int>(comps.size()) != k.size())
    throw ContractViolation("SpaceTree::key_for_components: size mismatch");
  uint64_t key = 0;
  for (int i = 0; i < k.size(); ++i)
    key = key * static_cast<uint64_t>(cards_[k[i]]) + static_cast<uint64_t>(comps[i]);
  return key;
}

std::vector<int> SpaceTree::unpack_key(uint64_t key, const IndexSet& k) const {
  std::vector<int> comps(k.size());
  for (int i = k.size() - 1; i >= 0; --i) {
    const uint64_t card = static_cast<uint64_t>(cards_[k[i]]);
    comps[i] = static_cast<int>(key % card);
    key /= card;
  }
  return comps;
}

void SpaceTree::update_all(const EnvState& state) {
  for (auto& node : nodes_) node.counter.increment(project_key(state, node.k));
}

double SpaceTree::normalized_entropy(int id) const {
  const Counter& c = nodes_[id].counter;
  if (c.total() == 0)
    throw UndefinedDistribution("normalized_entropy: counter has no observations");
  if (c.support_size() == 1) return kInf;
  const double h_max = std::log(static_cast<double>(c.support_size()));
  return std::clamp(c.entropy_nats() / h_max, 0.0, 1.0);
}

double SpaceTree::utility(int id) const {
  const double eta = normalized_entropy(id);
  return std::isinf(eta) ? -kInf : -eta;
}

int SpaceTree::sample_space(Rng& rng) const {
  // Gather finite utilities; nodes without data or with a single observed
  // outcome are excluded outright.
  std::vector<std::pair<int, double>> finite;
  finite.reserve(nodes_.size());
  double u_max = -kInf;
  for (int id = 0; id < node_count(); ++id) {
    const Counter& c = nodes_[id].counter;
    if (c.total() == 0 || c.support_size() == 1) continue;
    const double u = utility(id);
    finite.emplace_back(id, u);
    u_max = std::max(u_max, u);
  }
  if (finite.empty()) return static_cast<int>(rng.below(static_cast<uint64_t>(dims())));

  double norm = 0.0;
  for (auto& [id, u] : finite) {
    u = std::exp(u - u_max);
    norm += u;
  }
  double r = rng.real01() * norm;
  for (const auto& [id, w] : finite) {
    r -= w;
    if (r < 0.0) return id;
  }
  return finite.back().first;
}

int SpaceTree::expand(const IndexSet& k_star, const StateSource& states) {
  // Copy up front: callers may pass a reference into nodes_, which add_node
  // invalidates when the vector grows.
  const IndexSet base = k_star;
  const int parent = find(base);
  if (parent < 0) throw ContractViolation("SpaceTree::expand: k_star not in tree");
  if (base.size() >= max_dims_ || base.size() >= dims()) return 0;

  // Collect the missing supersets first, then fill all their counters with a
  // single pass over the stored states.
  std::vector<int> added;
  for (int e = 0; e < dims(); ++e) {
    if (base.contains(e)) continue;
    const IndexSet superset = base.with(e);
    if (find(superset) >= 0) continue;
    const int id = add_node(superset);
    nodes_[parent].children.push_back(id);
    added.push_back(id);
  }
  nodes_[parent].expanded = true;
  if (!added.empty()) {
    states([&](const EnvState& s) {
      for (int id : added) nodes_[id].counter.increment(project_key(s, nodes_[id].k));
    });
  }
  return static_cast<int>(added.size());
}

void SpaceTree::export_summary(std::ostream& os) const {
  for (int id = 0; id < node_count(); ++id) {
    const SpaceNode& n = nodes_[id];
    os << "k=" << n.k.to_string() << " support=" << n.counter.support_size()
       << " total=" << n.counter.total();
    os << " eta=";
    if (n.counter.total() == 0) {
      os << "-";
    } else {
      const double eta = normalized_entropy(id);
      if (std::isinf(eta)) {
        os << "inf";
      } else {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6f", eta);
        os << buf;
      }
    }
    os << " expanded=" << (n.expanded ? 1 : 0) << '\n';
  }
}

}  // namespace cmae
