#include "epinet/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "epinet/netgen.hpp"

namespace epinet {

double log_tree_given_graph(const TransmissionTree& p, const Graph& g) {
  if (p.m != g.m()) throw std::invalid_argument("log_tree_given_graph: size mismatch");
  double value = 0.0;
  for (int j = 1; j < p.m; ++j) {
    const int inf = p.infector[j];
    if (inf < 0 || inf >= j) return kNegInf;
    if (!g.has_edge(inf, j)) return kNegInf;  // P must lie within G
    int n_earlier = 0;
    const std::uint8_t* row = g.row_ptr(j);
    for (int i = 0; i < j; ++i) n_earlier += row[i];
    if (n_earlier == 0) return kNegInf;
    value -= std::log(static_cast<double>(n_earlier));
  }
  return value;
}

double si_edge_time_sum(const Graph& g, const std::vector<double>& times) {
  const int m = g.m();
  if (static_cast<int>(times.size()) != m)
    throw std::invalid_argument("si_edge_time_sum: times size");
  double sum = 0.0;
  for (int j = 1; j < m; ++j) {
    const std::uint8_t* row = g.row_ptr(j);
    for (int i = 0; i < j; ++i)
      if (row[i]) sum += times[j] - times[i];
  }
  return sum;
}

double log_times_given_graph(const std::vector<double>& times, const Graph& g,
                             double beta) {
  if (beta <= 0.0) throw std::invalid_argument("log_times_given_graph: beta > 0");
  return (g.m() - 1) * std::log(beta) - beta * si_edge_time_sum(g, times);
}

double log_l1_from_stats(const EdgeCountStats& s, double mu) {
  if (!s.feasible) return kNegInf;
  if (mu < 0.0) return kNegInf;
  if (mu == 0.0) {
    // degenerate point mass at x = 1
    const bool all_ones = (s.n_x1 == s.m - 2) && s.full_steps.empty();
    return all_ones ? 0.0 : kNegInf;
  }
  double value = -(s.m - 2) * mu + (s.edge_count - 1) * std::log(mu) +
                 s.n_x1 * (std::log1p(mu) - std::log(mu)) - s.sum_log_xfact;
  for (int step : s.full_steps) value += log_poisson_tail_ratio(step - 1, mu);
  return value;
}

NetworkEvaluator::NetworkEvaluator(int m) : m_(m), deg_(m, 0), selected_(m, 0) {
  if (m < 2) throw std::invalid_argument("NetworkEvaluator: m >= 2");
}

NetworkLoglik NetworkEvaluator::evaluate(const Graph& g, const NetworkOrder& sigma,
                                         double mu, double gamma) {
  const int m = m_;
  if (g.m() != m || sigma.size() != m)
    throw std::invalid_argument("NetworkEvaluator: size mismatch");
  NetworkLoglik out;
  out.stats.m = m;
  const int* order = sigma.sigma.data();
  if (!g.has_edge(order[0], order[1])) return out;  // -inf, infeasible

  EdgeCountStats& st = out.stats;
  st.feasible = true;
  st.edge_count = 1;

  deg_[0] = 1;
  deg_[1] = 1;
  double total_degree = 2.0;
  double log_l2 = 0.0;
  bool l2_alive = true;
  const double om_gamma = 1.0 - gamma;

  for (int p = 2; p < m; ++p) {  // entrant at 0-based position p, step i = p+1
    const std::uint8_t* row = g.row_ptr(order[p]);
    const double inv_total_degree = 1.0 / total_degree;
    const double inv_rank_norm = 2.0 / (static_cast<double>(p) * (p + 1));
    double pref_w = 0.0;
    int x = 0;
    for (int j = 0; j < p; ++j) {
      const double w =
          om_gamma * deg_[j] * inv_total_degree + gamma * (j + 1) * inv_rank_norm;
      if (row[order[j]]) {
        selected_[x++] = j;
        if (l2_alive) {
          if (w <= 0.0) {
            l2_alive = false;
          } else {
            const double denom = 1.0 - pref_w;
            if (denom <= 0.0) {
              l2_alive = false;
            } else {
              log_l2 += std::log(w) - std::log(denom);
            }
          }
        }
      }
      pref_w += w;
    }
    if (x == 0) {  // outside the censored support: whole likelihood vanishes
      st.feasible = false;
      return out;
    }
    st.edge_count += x;
    if (x == 1) ++st.n_x1;
    if (x == p) st.full_steps.push_back(p + 1);
    st.sum_log_xfact += std::lgamma(x + 1.0);
    if (l2_alive) log_l2 += std::lgamma(x + 1.0);

    for (int k = 0; k < x; ++k) ++deg_[selected_[k]];
    deg_[p] = x;
    total_degree += 2.0 * x;
  }

  out.log_l1 = log_l1_from_stats(st, mu);
  out.log_l2 = l2_alive ? log_l2 : kNegInf;
  return out;
}

double log_l1(const Graph& g, const NetworkOrder& sigma, double mu) {
  NetworkEvaluator eval(g.m());
  return eval.evaluate(g, sigma, mu, 0.0).log_l1;
}

double log_l2_approx(const Graph& g, const NetworkOrder& sigma, double gamma) {
  NetworkEvaluator eval(g.m());
  return eval.evaluate(g, sigma, 1.0, gamma).log_l2;
}

double log_l2_exact(const Graph& g, const NetworkOrder& sigma, double gamma) {
  const int m = g.m();
  if (sigma.size() != m) throw std::invalid_argument("log_l2_exact: sigma size");
  if (!g.has_edge(sigma.sigma[0], sigma.sigma[1])) return kNegInf;

  std::vector<int> degrees{1, 1};
  double value = 0.0;
  for (int step = 3; step <= m; ++step) {
    const int p = step - 1;
    std::vector<int> selected;
    for (int j = 0; j < p; ++j)
      if (g.has_edge(sigma.sigma[p], sigma.sigma[j])) selected.push_back(j);
    const int x = static_cast<int>(selected.size());
    if (x == 0) return kNegInf;
    if (x > 8) throw std::runtime_error("log_l2_exact: x_i > 8, factorial guard");

    const std::vector<double> w = attachment_weights(std::span<const int>(degrees), gamma);
    double set_prob = 0.0;
    std::vector<int> perm = selected;
    std::sort(perm.begin(), perm.end());
    do {
      double prob = 1.0, drawn = 0.0;
      for (int s : perm) {
        const double denom = 1.0 - drawn;
        if (w[s] <= 0.0 || denom <= 0.0) {
          prob = 0.0;
          break;
        }
        prob *= w[s] / denom;
        drawn += w[s];
      }
      set_prob += prob;
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (set_prob <= 0.0) return kNegInf;
    value += std::log(set_prob);

    for (int s : selected) ++degrees[s];
    degrees.push_back(x);
  }
  return value;
}

double log_network_given_params(const Graph& g, const NetworkOrder& sigma,
                                double mu, double gamma, L2Mode mode) {
  if (mode == L2Mode::exact) {
    const double l1 = log_l1(g, sigma, mu);
    if (l1 == kNegInf) return kNegInf;
    const double l2 = log_l2_exact(g, sigma, gamma);
    return l2 == kNegInf ? kNegInf : l1 + l2;
  }
  NetworkEvaluator eval(g.m());
  return eval.evaluate(g, sigma, mu, gamma).total();
}

namespace {

double log_gamma_prior(double x, double shape, double rate) {
  if (x <= 0.0) return kNegInf;
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) -
         rate * x;
}

}  // namespace

double log_joint(const Graph& g, const NetworkOrder& sigma,
                 const ParamState& params, const EpidemicData& data,
                 const Priors& priors, L2Mode mode) {
  if (params.beta <= 0.0 || params.mu <= 0.0) return kNegInf;
  if (params.gamma < 0.0 || params.gamma > 1.0) return kNegInf;
  const double tree = log_tree_given_graph(data.tree, g);
  if (tree == kNegInf) return kNegInf;
  const double net = log_network_given_params(g, sigma, params.mu, params.gamma, mode);
  if (net == kNegInf) return kNegInf;
  const double times = log_times_given_graph(data.times, g, params.beta);
  return tree + times + net + log_gamma_prior(params.beta, priors.a_beta, priors.b_beta) +
         log_gamma_prior(params.mu, priors.a_mu, priors.b_mu) -
         std::lgamma(data.m + 1.0);
}

double log_integrated_beta_kernel(int m, double si_sum, const Priors& priors) {
  return -(priors.a_beta + m - 1) * std::log(priors.b_beta + si_sum);
}

}  // namespace epinet
