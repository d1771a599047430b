#include "cmae/snapshot.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "cmae/error.hpp"

namespace cmae {

namespace {

constexpr char kQMagic[8] = {'C', 'M', 'A', 'E', 'Q', 'T', '1', '\0'};
constexpr char kCMagic[8] = {'C', 'M', 'A', 'E', 'C', 'T', '1', '\0'};

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ContractViolation("snapshot: truncated file");
  return v;
}

}  // namespace

void save_qtables(const std::string& path, std::span<const QTable> tables) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open snapshot file for writing: " + path);
  os.write(kQMagic, sizeof(kQMagic));
  write_pod<uint32_t>(os, static_cast<uint32_t>(tables.size()));
  for (const QTable& t : tables) {
    write_pod<uint32_t>(os, static_cast<uint32_t>(t.n_actions()));
    write_pod<double>(os, t.step_size());
    write_pod<double>(os, t.gamma());

    std::vector<std::pair<uint64_t, FlatQMap::Values>> entries;
    entries.reserve(t.size());
    t.for_each([&](uint64_t key, const FlatQMap::Values& v) { entries.emplace_back(key, v); });
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    write_pod<uint64_t>(os, entries.size());
    for (const auto& [key, v] : entries) {
      write_pod<uint64_t>(os, key);
      for (int a = 0; a < t.n_actions(); ++a) write_pod<float>(os, v[a]);
    }
  }
  if (!os) throw ConfigError("failed writing snapshot: " + path);
}

std::vector<QTable> load_qtables(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open snapshot file: " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kQMagic, sizeof(magic)) != 0)
    throw ContractViolation("snapshot: bad magic in " + path);

  const auto n_tables = read_pod<uint32_t>(is);
  std::vector<QTable> tables;
  tables.reserve(n_tables);
  for (uint32_t i = 0; i < n_tables; ++i) {
    const auto n_actions = read_pod<uint32_t>(is);
    const auto step = read_pod<double>(is);
    const auto gamma = read_pod<double>(is);
    QTable t(static_cast<int>(n_actions), step, gamma);
    const auto n_entries = read_pod<uint64_t>(is);
    for (uint64_t e = 0; e < n_entries; ++e) {
      const auto key = read_pod<uint64_t>(is);
      FlatQMap::Values v{};
      for (uint32_t a = 0; a < n_actions; ++a) v[a] = read_pod<float>(is);
      t.insert_raw(key, v);
    }
    tables.push_back(std::move(t));
  }
  return tables;
}

void save_counters(const std::string& path, const SpaceTree& tree) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open counter file for writing: " + path);
  os.write(kCMagic, sizeof(kCMagic));
  write_pod<uint32_t>(os, static_cast<uint32_t>(tree.dims()));
  // Cardinalities travel with the file so keys can be unpacked later.
  for (int card : tree.cardinalities()) write_pod<int32_t>(os, card);
  write_pod<uint32_t>(os, static_cast<uint32_t>(tree.node_count()));
  for (int id = 0; id < tree.node_count(); ++id) {
    const SpaceNode& node = tree.node(id);
    write_pod<uint8_t>(os, static_cast<uint8_t>(node.k.size()));
    for (int i = 0; i < node.k.size(); ++i)
      write_pod<uint8_t>(os, static_cast<uint8_t>(node.k[i]));
    write_pod<uint64_t>(os, node.counter.support_size());
    node.counter.for_each([&](uint64_t key, uint64_t count) {
      write_pod<uint64_t>(os, key);
      write_pod<uint64_t>(os, count);
    });
  }
  if (!os) throw ConfigError("failed writing counter file: " + path);
}

CounterDump load_counters(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open counter file: " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kCMagic, sizeof(magic)) != 0)
    throw ContractViolation("counter file: bad magic in " + path);

  CounterDump dump;
  const auto dims = read_pod<uint32_t>(is);
  dump.cardinalities.resize(dims);
  for (auto& c : dump.cardinalities) c = read_pod<int32_t>(is);
  const auto n_nodes = read_pod<uint32_t>(is);
  dump.nodes.resize(n_nodes);
  for (auto& node : dump.nodes) {
    const auto ksize = read_pod<uint8_t>(is);
    std::vector<int> indices(ksize);
    for (auto& e : indices) e = read_pod<uint8_t>(is);
    node.k = IndexSet::from(indices);
    const auto n_entries = read_pod<uint64_t>(is);
    node.entries.resize(n_entries);
    for (auto& [key, count] : node.entries) {
      key = read_pod<uint64_t>(is);
      count = read_pod<uint64_t>(is);
    }
  }
  return dump;
}

}  // namespace cmae
