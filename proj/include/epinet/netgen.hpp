#ifndef EPINET_NETGEN_HPP
#define EPINET_NETGEN_HPP

#include <span>
#include <utility>
#include <vector>

#include "epinet/rng.hpp"
#include "epinet/types.hpp"

namespace epinet {

// log P(Poisson(mu) >= k). Stable for small tails: anchored at the first term
// in log space with a convergent ratio series when mu < k.
double log_poisson_tail(int k, double mu);

// log of [sum_{z>=k} mu^z/z!] / [mu^k/k!] >= 0, the tail over its leading
// term with the e^{-mu} factor left out. Always finite; the network
// likelihood uses it so the connect-to-all branch never underflows.
double log_poisson_tail_ratio(int k, double mu);

// Number-of-new-edges distribution at entry step i (1-based, i >= 3):
// support {1..i-1}, mass below 1 folded into 1 and mass above i-2 folded
// into i-1. mu == 0 is the degenerate point mass at 1.
double censored_poisson_pmf(int x, int step, double mu);
double log_censored_poisson_pmf(int x, int step, double mu);

int sample_new_edge_count(int step, double mu, Rng& rng);

// Mixture attachment weights over earlier entrants: degree share vs entry
// recency. degrees[j] = degree of the (j+1)-th entrant within the partial
// graph of the first (step-1) entrants.
std::vector<double> attachment_weights(std::span<const int> degrees, double gamma);

// Convenience overload computing degrees from a full graph + entry order.
std::vector<double> attachment_weights(const Graph& g, const NetworkOrder& sigma,
                                       int step, double gamma);

// Sequential weighted sampling without replacement: draws proportional to the
// remaining weights, renormalizing after each removal. Returns 0-based
// positions, in draw order. Throws if fewer than x positions have positive
// weight.
std::vector<int> sample_attachment_targets(std::span<const double> weights, int x,
                                           Rng& rng);

// Grows a network by sequential attachment: entrants sigma[0], sigma[1] start
// connected; each later entrant draws a censored-Poisson edge count and
// attaches by weighted sampling without replacement.
std::pair<Graph, GenerationRecord> generate_pa_network(int m, double mu,
                                                       double gamma,
                                                       const NetworkOrder& sigma,
                                                       Rng& rng);

// Bernoulli random graph; no connectivity repair.
Graph generate_brg(int m, double p, Rng& rng);

}  // namespace epinet

#endif
