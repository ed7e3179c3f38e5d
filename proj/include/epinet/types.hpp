#ifndef EPINET_TYPES_HPP
#define EPINET_TYPES_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace epinet {

// All node labels are 1-based in any external interface (files, CLI, reports);
// in-memory indices are 0-based throughout.

// Symmetric simple graph on m nodes, adjacency-matrix storage.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int m) : m_(m), adj_(static_cast<std::size_t>(m) * m, 0) {
    if (m < 2) throw std::invalid_argument("Graph: need m >= 2");
  }

  int m() const { return m_; }
  int edge_count() const { return edge_count_; }

  bool has_edge(int i, int j) const { return adj_[idx(i, j)] != 0; }

  void set_edge(int i, int j, bool present) {
    check_pair(i, j);
    std::uint8_t v = present ? 1 : 0;
    if (adj_[idx(i, j)] == v) return;
    adj_[idx(i, j)] = v;
    adj_[idx(j, i)] = v;
    edge_count_ += present ? 1 : -1;
  }

  void toggle_edge(int i, int j) { set_edge(i, j, !has_edge(i, j)); }

  int degree(int i) const {
    int d = 0;
    const std::uint8_t* row = row_ptr(i);
    for (int j = 0; j < m_; ++j) d += row[j];
    return d;
  }

  // raw row access for hot likelihood loops
  const std::uint8_t* row_ptr(int i) const {
    return adj_.data() + static_cast<std::size_t>(i) * m_;
  }

  bool connected() const;

  bool operator==(const Graph& o) const = default;

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * m_ + j;
  }
  void check_pair(int i, int j) const {
    if (i == j) throw std::invalid_argument("Graph: self-loop");
    if (i < 0 || j < 0 || i >= m_ || j >= m_)
      throw std::out_of_range("Graph: node index");
  }

  int m_ = 0;
  int edge_count_ = 0;
  std::vector<std::uint8_t> adj_;
};

// Who-infected-whom tree rooted at node 0; infector[j] < j for j >= 1.
struct TransmissionTree {
  int m = 0;
  std::vector<int> infector;  // infector[0] == -1 (root), size m

  TransmissionTree() = default;
  explicit TransmissionTree(int m_) : m(m_), infector(m_, -1) {}

  bool has_edge(int i, int j) const {
    if (i > j) std::swap(i, j);
    return j >= 1 && infector[j] == i;
  }
};

// Tri-state partial edge observation: per unordered pair, present/absent/unknown.
class KnownEdges {
 public:
  KnownEdges() = default;
  explicit KnownEdges(int m) : m_(m), state_(static_cast<std::size_t>(m) * m, -1) {}

  int m() const { return m_; }
  bool empty() const { return m_ == 0; }

  // -1 unknown, 0 absent, 1 present
  int state(int i, int j) const {
    return empty() ? -1 : state_[static_cast<std::size_t>(i) * m_ + j];
  }
  bool is_clamped(int i, int j) const { return state(i, j) >= 0; }

  void clamp(int i, int j, bool present) {
    if (i == j) throw std::invalid_argument("KnownEdges: self-pair");
    state_[static_cast<std::size_t>(i) * m_ + j] = present ? 1 : 0;
    state_[static_cast<std::size_t>(j) * m_ + i] = present ? 1 : 0;
  }

 private:
  int m_ = 0;
  std::vector<std::int8_t> state_;
};

// Normalized epidemic dataset: times[0] == 0, strictly increasing.
struct EpidemicData {
  int m = 0;
  std::vector<double> times;  // days, shifted so times[0] == 0
  TransmissionTree tree;
  KnownEdges known_edges;  // optional; empty() when absent
};

// sigma[k] = 0-based epidemic label of the (k+1)-th node to enter the network.
struct NetworkOrder {
  std::vector<int> sigma;

  NetworkOrder() = default;
  static NetworkOrder identity(int m) {
    NetworkOrder o;
    o.sigma.resize(m);
    for (int k = 0; k < m; ++k) o.sigma[k] = k;
    return o;
  }
  int size() const { return static_cast<int>(sigma.size()); }
  bool is_permutation() const;
};

struct ParamState {
  double beta = 0.4;
  double mu = 1.0;
  double gamma = 0.0;
};

// Gamma(shape a, rate b) priors for beta and mu; gamma ~ U[0,1], sigma uniform.
struct Priors {
  double a_beta = 1.0;
  double b_beta = 0.001;
  double a_mu = 1.0;
  double b_mu = 0.001;
};

struct BrgParams {
  double p = 0.5;
  double a_p = 1.0;
  double b_p = 1.0;
};

// One growth step of the attachment process (step index is 1-based entry rank).
struct GenerationStep {
  int step = 0;                    // i in 3..m (1-based)
  int new_edges = 0;               // x_i
  std::vector<int> selected;       // 0-based positions among earlier entrants
  std::vector<double> weights;     // weight vector used at this step
};

using GenerationRecord = std::vector<GenerationStep>;

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Raw ingestion record prior to relabeling; infector empty for the root.
struct RawRecord {
  std::string id;
  double time = 0.0;
  std::string infector;  // empty == no infector
};

ValidationReport validate_dataset(const EpidemicData& d);

// Relabels nodes 0..m-1 in ascending time order, shifts times so the root is
// at 0, and remaps infector references. Throws on duplicate times, unknown
// infector ids, or root count != 1.
EpidemicData normalize_and_relabel(const std::vector<RawRecord>& raw);

// Union-find connectivity over an explicit edge list; shared by validation
// and generators.
bool edges_connect_all(int m, const std::vector<std::pair<int, int>>& edges);

}  // namespace epinet

#endif
