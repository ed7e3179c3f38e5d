#ifndef EPINET_LIKELIHOOD_HPP
#define EPINET_LIKELIHOOD_HPP

#include <limits>
#include <vector>

#include "epinet/types.hpp"

namespace epinet {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log of the uniform-pathway tree probability: -sum_j log(#earlier neighbours
// of j), with -inf flagging a tree edge outside g or a node with no earlier
// neighbour. -inf is the in-band zero-probability signal throughout.
double log_tree_given_graph(const TransmissionTree& p, const Graph& g);

// sum over present edges {i<j} of (times[j] - times[i]), in days.
double si_edge_time_sum(const Graph& g, const std::vector<double>& times);

// (m-1) log beta - beta * si_edge_time_sum
double log_times_given_graph(const std::vector<double>& times, const Graph& g,
                             double beta);

// Sufficient statistics of the edge-count sequence x_i (entry order), enough
// to re-evaluate the L1 factor at a new mu without touching the graph.
struct EdgeCountStats {
  bool feasible = false;       // first pair connected and x_i >= 1 for all i
  int m = 0;
  int edge_count = 0;          // |G|
  int n_x1 = 0;                // #{i >= 3 : x_i == 1}
  double sum_log_xfact = 0.0;  // sum_i log(x_i!)
  std::vector<int> full_steps; // 1-based steps with x_i == i-1
};

struct NetworkLoglik {
  double log_l1 = kNegInf;
  double log_l2 = kNegInf;
  EdgeCountStats stats;
  double total() const {
    if (log_l1 == kNegInf || log_l2 == kNegInf) return kNegInf;
    return log_l1 + log_l2;
  }
};

// Single-pass evaluator of the network log-likelihood (L1 and the
// one-permutation L2) for a graph under an entry order. Owns scratch buffers;
// one instance per chain, bound to m.
class NetworkEvaluator {
 public:
  explicit NetworkEvaluator(int m);

  NetworkLoglik evaluate(const Graph& g, const NetworkOrder& sigma, double mu,
                         double gamma);

 private:
  int m_;
  std::vector<int> deg_;       // degree within the partial graph, by position
  std::vector<int> selected_;  // scratch: positions chosen at the current step
};

double log_l1_from_stats(const EdgeCountStats& s, double mu);

double log_l1(const Graph& g, const NetworkOrder& sigma, double mu);
double log_l2_approx(const Graph& g, const NetworkOrder& sigma, double gamma);

// Test oracle: exact set-selection probability summed over all orderings of
// each step's chosen set, with denominators subtracting only the weights
// already drawn. Guarded against factorial blowup (any x_i > 8 throws).
double log_l2_exact(const Graph& g, const NetworkOrder& sigma, double gamma);

enum class L2Mode { approx, exact };

double log_network_given_params(const Graph& g, const NetworkOrder& sigma,
                                double mu, double gamma,
                                L2Mode mode = L2Mode::approx);

// Full posterior kernel: tree + times + network terms plus log-priors for
// beta, mu (Gamma), gamma (uniform on [0,1]) and the uniform order prior
// -log(m!). -inf propagates.
double log_joint(const Graph& g, const NetworkOrder& sigma,
                 const ParamState& params, const EpidemicData& data,
                 const Priors& priors, L2Mode mode = L2Mode::approx);

// Contribution of the times factor after integrating beta out:
// -(a_beta + m - 1) * log(b_beta + si_sum). Callers supply the network and
// tree factors.
double log_integrated_beta_kernel(int m, double si_sum, const Priors& priors);

}  // namespace epinet

#endif
