#include "epinet/types.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace epinet {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

bool edges_connect_all(int m, const std::vector<std::pair<int, int>>& edges) {
  if (m <= 1) return true;
  UnionFind uf(m);
  for (const auto& [a, b] : edges) uf.unite(a, b);
  const int root = uf.find(0);
  for (int i = 1; i < m; ++i)
    if (uf.find(i) != root) return false;
  return true;
}

bool Graph::connected() const {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(edge_count_);
  for (int i = 0; i < m_; ++i)
    for (int j = i + 1; j < m_; ++j)
      if (has_edge(i, j)) edges.emplace_back(i, j);
  return edges_connect_all(m_, edges);
}

bool NetworkOrder::is_permutation() const {
  std::vector<char> seen(sigma.size(), 0);
  for (int v : sigma) {
    if (v < 0 || v >= size() || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

ValidationReport validate_dataset(const EpidemicData& d) {
  ValidationReport report;
  auto add = [&report](const std::string& msg) { report.violations.push_back(msg); };

  if (d.m < 2) add("population size must be at least 2");
  if (static_cast<int>(d.times.size()) != d.m)
    add("times length does not match m");
  if (!d.times.empty() && d.times[0] != 0.0)
    add("first infection time must be 0");
  for (int j = 1; j < static_cast<int>(d.times.size()); ++j) {
    if (!(d.times[j] > d.times[j - 1])) {
      std::ostringstream os;
      os << "times not strictly increasing at node " << j + 1;
      add(os.str());
    }
  }

  if (d.tree.m != d.m || static_cast<int>(d.tree.infector.size()) != d.m) {
    add("tree size does not match m");
    return report;
  }
  if (d.tree.infector[0] != -1) add("node 1 must have no infector");
  std::vector<std::pair<int, int>> edges;
  for (int j = 1; j < d.m; ++j) {
    const int i = d.tree.infector[j];
    if (i < 0 || i >= j) {
      std::ostringstream os;
      os << "node " << j + 1 << " must be infected by an earlier node";
      add(os.str());
      continue;
    }
    edges.emplace_back(i, j);
  }
  if (static_cast<int>(edges.size()) == d.m - 1 && !edges_connect_all(d.m, edges))
    add("transmission tree does not span the population");

  if (!d.known_edges.empty()) {
    if (d.known_edges.m() != d.m) add("known_edges size does not match m");
    for (int j = 1; j < d.m; ++j) {
      const int i = d.tree.infector[j];
      if (i >= 0 && d.known_edges.state(i, j) == 0) {
        std::ostringstream os;
        os << "known_edges marks tree edge {" << i + 1 << "," << j + 1
           << "} absent";
        add(os.str());
      }
    }
  }
  return report;
}

EpidemicData normalize_and_relabel(const std::vector<RawRecord>& raw) {
  const int m = static_cast<int>(raw.size());
  if (m < 2) throw std::invalid_argument("normalize_and_relabel: need at least 2 records");

  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&raw](int a, int b) {
    return raw[a].time < raw[b].time;
  });
  for (int k = 1; k < m; ++k) {
    if (raw[order[k]].time == raw[order[k - 1]].time) {
      std::ostringstream os;
      os << "duplicate infection time " << raw[order[k]].time << " (ids '"
         << raw[order[k - 1]].id << "', '" << raw[order[k]].id << "')";
      throw std::invalid_argument(os.str());
    }
  }

  std::map<std::string, int> label;  // id -> new 0-based label
  for (int k = 0; k < m; ++k) {
    if (!label.emplace(raw[order[k]].id, k).second)
      throw std::invalid_argument("duplicate node id '" + raw[order[k]].id + "'");
  }

  EpidemicData data;
  data.m = m;
  data.times.resize(m);
  data.tree = TransmissionTree(m);
  const double t0 = raw[order[0]].time;

  int roots = 0;
  for (int k = 0; k < m; ++k) {
    const RawRecord& r = raw[order[k]];
    data.times[k] = r.time - t0;
    if (r.infector.empty()) {
      ++roots;
      if (k != 0)
        throw std::invalid_argument("root '" + r.id + "' is not the earliest record");
      continue;
    }
    auto it = label.find(r.infector);
    if (it == label.end())
      throw std::invalid_argument("unknown infector id '" + r.infector + "' for '" +
                                  r.id + "'");
    if (it->second >= k)
      throw std::invalid_argument("infector of '" + r.id + "' is not infected earlier");
    data.tree.infector[k] = it->second;
  }
  if (roots != 1) {
    std::ostringstream os;
    os << "expected exactly one root record, found " << roots;
    throw std::invalid_argument(os.str());
  }
  return data;
}

}  // namespace epinet
