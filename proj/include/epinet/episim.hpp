#ifndef EPINET_EPISIM_HPP
#define EPINET_EPISIM_HPP

#include <vector>

#include "epinet/rng.hpp"
#include "epinet/types.hpp"

namespace epinet {

struct SimulatedEpidemic {
  std::vector<double> times;   // relabeled, times[0] == 0
  TransmissionTree tree;       // relabeled
  std::vector<int> order;      // order[k] = original graph label of node k
};

// Event-driven SI simulation on a fixed graph: each susceptible-infected edge
// fires at rate beta; the firing edge is uniform among active edges. Output is
// relabeled to infection order with times shifted so the index case sits at 0.
// Runs to full infection; throws if the graph is disconnected.
SimulatedEpidemic simulate_si(const Graph& g, double beta, int initial, Rng& rng);

// Relabels a graph by new label k <-> old label order[k].
Graph relabel_graph(const Graph& g, const std::vector<int>& order);

// count(t) = #{i : times[i] <= t}, evaluated at each grid point.
std::vector<int> cumulative_curve(const std::vector<double>& times,
                                  const std::vector<double>& grid);

}  // namespace epinet

#endif
