#ifndef EPINET_ANALYSIS_HPP
#define EPINET_ANALYSIS_HPP

#include <cstdint>
#include <vector>

#include "epinet/mcmc.hpp"

namespace epinet {

// mu* = mu + exp(-mu): large-step mean of the censored edge-count
// distribution. Nondecreasing from 1 at mu = 0.
double mu_star(double mu);

struct PosteriorSummary {
  int kept_n = 0;
  bool has_p = false;  // set for BRG traces
  double beta_mean = 0, beta_sd = 0;
  double mu_mean = 0, mu_sd = 0;
  double gamma_mean = 0, gamma_sd = 0;
  double p_mean = 0, p_sd = 0;           // BRG traces only
  double alpha_mean = 0, alpha_sd = 0;   // alpha_k = beta_k * mu*(mu_k), per draw
  double corr_beta_mustar = 0;
  double corr_beta_p = 0;                // BRG traces only
};

PosteriorSummary summarize_trace(const Trace& trace);

// Per-pair posterior inclusion probability, triangular pair_index order.
std::vector<double> edge_posterior(const Trace& trace);

struct PredictiveBands {
  std::vector<double> grid;
  std::vector<double> lo;   // 2.5%
  std::vector<double> med;  // 50%
  std::vector<double> hi;   // 97.5%
};

// For each simulation: resample (beta, mu) from the trace, grow a PA network
// (identity entry order), run the SI epidemic, evaluate the cumulative curve.
// Seeds are derived as split_seed(base_seed, sim index), so results do not
// depend on execution order.
PredictiveBands posterior_predictive_curves(const Trace& trace, int m,
                                            const std::vector<double>& grid,
                                            int n_sims, double gamma,
                                            std::uint64_t base_seed);

// Exact P(Binomial(n, p) >= k), accumulated in log space.
double binomial_tail(int n, double p, int k);

double quantile(std::vector<double> sorted_or_not, double q);

}  // namespace epinet

#endif
