#include "epinet/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "epinet/episim.hpp"
#include "epinet/netgen.hpp"

namespace epinet {

double mu_star(double mu) {
  if (mu < 0.0) throw std::invalid_argument("mu_star: mu >= 0");
  return mu + std::exp(-mu);
}

namespace {

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

double sd_unbiased(const std::vector<double>& v, double mu) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return std::sqrt(s / (v.size() - 1));
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sab += (a[k] - ma) * (b[k] - mb);
    saa += (a[k] - ma) * (a[k] - ma);
    sbb += (b[k] - mb) * (b[k] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

PosteriorSummary summarize_trace(const Trace& trace) {
  if (trace.kept_n() < 2)
    throw std::invalid_argument("summarize_trace: need at least 2 kept draws");
  PosteriorSummary s;
  s.kept_n = trace.kept_n();
  s.beta_mean = mean(trace.beta);
  s.beta_sd = sd_unbiased(trace.beta, s.beta_mean);

  if (!trace.mu.empty()) {
    s.mu_mean = mean(trace.mu);
    s.mu_sd = sd_unbiased(trace.mu, s.mu_mean);
    s.gamma_mean = mean(trace.gamma);
    s.gamma_sd = sd_unbiased(trace.gamma, s.gamma_mean);

    std::vector<double> mustar(trace.mu.size()), alpha(trace.mu.size());
    for (std::size_t k = 0; k < trace.mu.size(); ++k) {
      mustar[k] = mu_star(trace.mu[k]);
      alpha[k] = trace.beta[k] * mustar[k];
    }
    s.alpha_mean = mean(alpha);
    s.alpha_sd = sd_unbiased(alpha, s.alpha_mean);
    s.corr_beta_mustar = correlation(trace.beta, mustar);
  }
  if (!trace.p.empty()) {
    s.has_p = true;
    s.p_mean = mean(trace.p);
    s.p_sd = sd_unbiased(trace.p, s.p_mean);
    s.corr_beta_p = correlation(trace.beta, trace.p);
  }
  return s;
}

std::vector<double> edge_posterior(const Trace& trace) {
  if (trace.kept_n() < 1)
    throw std::invalid_argument("edge_posterior: empty trace");
  std::vector<double> probs(trace.edge_tally.size());
  for (std::size_t k = 0; k < probs.size(); ++k)
    probs[k] = static_cast<double>(trace.edge_tally[k]) / trace.kept_n();
  return probs;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(v.begin(), v.end());
  if (v.size() == 1) return v[0];
  const double h = q * (v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - lo) * (v[hi] - v[lo]);
}

PredictiveBands posterior_predictive_curves(const Trace& trace, int m,
                                            const std::vector<double>& grid,
                                            int n_sims, double gamma,
                                            std::uint64_t base_seed) {
  if (trace.kept_n() < 1 || trace.mu.empty())
    throw std::invalid_argument("posterior_predictive_curves: need a PA trace");
  if (n_sims < 1) throw std::invalid_argument("posterior_predictive_curves: n_sims >= 1");

  std::vector<std::vector<int>> curves(n_sims);
  for (int k = 0; k < n_sims; ++k) {
    Rng rng(split_seed(base_seed, static_cast<std::uint64_t>(k)));
    std::uniform_int_distribution<int> pick(0, trace.kept_n() - 1);
    const int draw = pick(rng);
    const double beta = trace.beta[draw];
    const double mu = trace.mu[draw];
    auto [g, record] = generate_pa_network(m, mu, gamma, NetworkOrder::identity(m), rng);
    SimulatedEpidemic epi = simulate_si(g, beta, 0, rng);
    curves[k] = cumulative_curve(epi.times, grid);
  }

  PredictiveBands bands;
  bands.grid = grid;
  bands.lo.resize(grid.size());
  bands.med.resize(grid.size());
  bands.hi.resize(grid.size());
  std::vector<double> column(n_sims);
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    for (int k = 0; k < n_sims; ++k) column[k] = curves[k][gi];
    bands.lo[gi] = quantile(column, 0.025);
    bands.med[gi] = quantile(column, 0.5);
    bands.hi[gi] = quantile(column, 0.975);
  }
  return bands;
}

double binomial_tail(int n, double p, int k) {
  if (n < 0 || k < 0 || k > n) throw std::invalid_argument("binomial_tail: 0 <= k <= n");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("binomial_tail: p in [0,1]");
  if (k == 0) return 1.0;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;

  // log-space accumulation of sum_{x>=k} C(n,x) p^x (1-p)^(n-x)
  const double logp = std::log(p), log1mp = std::log1p(-p);
  double log_sum = kNegInf;
  for (int x = k; x <= n; ++x) {
    const double term = std::lgamma(n + 1.0) - std::lgamma(x + 1.0) -
                        std::lgamma(n - x + 1.0) + x * logp + (n - x) * log1mp;
    if (term > log_sum)
      log_sum = term + std::log1p(std::exp(log_sum - term));
    else
      log_sum = log_sum + std::log1p(std::exp(term - log_sum));
  }
  return std::exp(log_sum);
}

}  // namespace epinet
