#include "epinet/episim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace epinet {

SimulatedEpidemic simulate_si(const Graph& g, double beta, int initial, Rng& rng) {
  const int m = g.m();
  if (beta <= 0.0) throw std::invalid_argument("simulate_si: beta > 0");
  if (initial < 0 || initial >= m) throw std::out_of_range("simulate_si: initial node");
  if (!g.connected())
    throw std::runtime_error("simulate_si: graph is disconnected, epidemic cannot complete");

  std::vector<char> infected(m, 0);
  std::vector<int> si_count(m, 0);  // infected-neighbour count per susceptible
  std::vector<int> order;           // original labels in infection order
  std::vector<double> raw_times;
  order.reserve(m);
  raw_times.reserve(m);

  double t = 0.0;
  TransmissionTree tree(m);  // filled in relabeled space later
  std::vector<int> raw_infector(m, -1);

  auto infect = [&](int node, int by, double at) {
    infected[node] = 1;
    raw_infector[node] = by;
    order.push_back(node);
    raw_times.push_back(at);
    const std::uint8_t* row = g.row_ptr(node);
    for (int j = 0; j < m; ++j)
      if (row[j] && !infected[j]) ++si_count[j];
  };
  infect(initial, -1, 0.0);

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  for (int k = 1; k < m; ++k) {
    long total = 0;
    for (int j = 0; j < m; ++j)
      if (!infected[j]) total += si_count[j];
    // connected graph with susceptibles left => at least one active edge
    t += expo(rng) / (beta * static_cast<double>(total));

    // pick the firing SI edge uniformly: first the infectee proportional to
    // its infected-neighbour count, then the infector uniformly among those
    long pick = static_cast<long>(unif(rng) * static_cast<double>(total));
    if (pick >= total) pick = total - 1;
    int infectee = -1;
    for (int j = 0; j < m; ++j) {
      if (infected[j]) continue;
      if (pick < si_count[j]) {
        infectee = j;
        break;
      }
      pick -= si_count[j];
    }
    int nth = static_cast<int>(pick);
    int infector = -1;
    const std::uint8_t* row = g.row_ptr(infectee);
    for (int j = 0; j < m; ++j) {
      if (row[j] && infected[j] && nth-- == 0) {
        infector = j;
        break;
      }
    }
    infect(infectee, infector, t);
  }

  // relabel to infection order
  std::vector<int> new_label(m);
  for (int k = 0; k < m; ++k) new_label[order[k]] = k;
  SimulatedEpidemic out;
  out.order = order;
  out.times = raw_times;  // already ascending; shift so index case is at 0
  const double t0 = out.times[0];
  for (double& v : out.times) v -= t0;
  out.tree = TransmissionTree(m);
  for (int k = 1; k < m; ++k)
    out.tree.infector[k] = new_label[raw_infector[order[k]]];
  return out;
}

Graph relabel_graph(const Graph& g, const std::vector<int>& order) {
  const int m = g.m();
  if (static_cast<int>(order.size()) != m)
    throw std::invalid_argument("relabel_graph: order size");
  Graph out(m);
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      if (g.has_edge(order[a], order[b])) out.set_edge(a, b, true);
  return out;
}

std::vector<int> cumulative_curve(const std::vector<double>& times,
                                  const std::vector<double>& grid) {
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (grid[k] < grid[k - 1])
      throw std::invalid_argument("cumulative_curve: grid must be ascending");
  std::vector<double> sorted(times);
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> counts(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    counts[k] = static_cast<int>(
        std::upper_bound(sorted.begin(), sorted.end(), grid[k]) - sorted.begin());
  }
  return counts;
}

}  // namespace epinet
