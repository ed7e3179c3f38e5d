#include "epinet/netgen.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <stdexcept>

#include "epinet/likelihood.hpp"

namespace epinet {

double log_poisson_tail_ratio(int k, double mu) {
  if (k <= 0) throw std::invalid_argument("log_poisson_tail_ratio: k >= 1");
  if (mu < 0) throw std::invalid_argument("log_poisson_tail_ratio: mu >= 0");
  if (mu == 0.0) return 0.0;  // ratio -> 1 as every higher term vanishes
  // sum_{r>=0} mu^r k!/(k+r)! ; terms shrink by mu/(k+r+1)
  double term = 1.0, sum = 1.0;
  for (int r = 1; r < 100000; ++r) {
    term *= mu / (k + r);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return std::log(sum);
}

double log_poisson_tail(int k, double mu) {
  if (k <= 0) return 0.0;
  if (mu <= 0.0) return kNegInf;
  if (mu >= k) {
    // tail is order one; the regularized lower incomplete gamma is safe here
    return std::log(boost::math::gamma_p(static_cast<double>(k), mu));
  }
  return -mu + log_poisson_tail_ratio(k, mu) + k * std::log(mu) -
         std::lgamma(k + 1.0);
}

double log_censored_poisson_pmf(int x, int step, double mu) {
  if (step < 3) throw std::invalid_argument("censored_poisson: step >= 3");
  if (x < 1 || x > step - 1)
    throw std::out_of_range("censored_poisson: x outside {1..i-1}");
  if (mu < 0) throw std::invalid_argument("censored_poisson: mu >= 0");
  if (mu == 0.0) return x == 1 ? 0.0 : kNegInf;
  if (x == 1) return -mu + std::log1p(mu);
  if (x == step - 1) return log_poisson_tail(step - 1, mu);
  return -mu + x * std::log(mu) - std::lgamma(x + 1.0);
}

double censored_poisson_pmf(int x, int step, double mu) {
  return std::exp(log_censored_poisson_pmf(x, step, mu));
}

int sample_new_edge_count(int step, double mu, Rng& rng) {
  if (step < 3) throw std::invalid_argument("sample_new_edge_count: step >= 3");
  if (mu == 0.0) return 1;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  double acc = 0.0;
  for (int x = 1; x < step - 1; ++x) {
    acc += censored_poisson_pmf(x, step, mu);
    if (u < acc) return x;
  }
  return step - 1;  // tail branch absorbs the remainder
}

std::vector<double> attachment_weights(std::span<const int> degrees, double gamma) {
  const int n = static_cast<int>(degrees.size());  // n = i-1 earlier entrants
  if (n < 2) throw std::invalid_argument("attachment_weights: need >= 2 entrants");
  if (gamma < 0.0 || gamma > 1.0)
    throw std::invalid_argument("attachment_weights: gamma in [0,1]");
  long total_degree = 0;
  for (int d : degrees) total_degree += d;
  if (gamma < 1.0 && total_degree == 0)
    throw std::invalid_argument("attachment_weights: empty partial graph");

  const double rank_norm = n * (n + 1) / 2.0;  // sum of 1..n
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) {
    double value = gamma * (j + 1) / rank_norm;
    if (gamma < 1.0) value += (1.0 - gamma) * degrees[j] / static_cast<double>(total_degree);
    w[j] = value;
  }
  return w;
}

std::vector<double> attachment_weights(const Graph& g, const NetworkOrder& sigma,
                                       int step, double gamma) {
  const int n = step - 1;
  std::vector<int> degrees(n, 0);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (g.has_edge(sigma.sigma[a], sigma.sigma[b])) {
        ++degrees[a];
        ++degrees[b];
      }
  return attachment_weights(degrees, gamma);
}

std::vector<int> sample_attachment_targets(std::span<const double> weights, int x,
                                           Rng& rng) {
  const int n = static_cast<int>(weights.size());
  if (x < 0 || x > n)
    throw std::invalid_argument("sample_attachment_targets: x outside 0..n");
  int positive = 0;
  for (double w : weights) positive += (w > 0.0) ? 1 : 0;
  if (positive < x)
    throw std::runtime_error("sample_attachment_targets: fewer than x positive weights");

  std::vector<double> w(weights.begin(), weights.end());
  double remaining = 0.0;
  for (double v : w) remaining += v;
  std::vector<int> picked;
  picked.reserve(x);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int draw = 0; draw < x; ++draw) {
    double u = unif(rng) * remaining;
    int choice = -1;
    for (int j = 0; j < n; ++j) {
      if (w[j] <= 0.0) continue;
      u -= w[j];
      if (u < 0.0) {
        choice = j;
        break;
      }
    }
    if (choice < 0) {  // fp slack: take the last positive-weight position
      for (int j = n - 1; j >= 0; --j)
        if (w[j] > 0.0) {
          choice = j;
          break;
        }
    }
    picked.push_back(choice);
    remaining -= w[choice];
    w[choice] = 0.0;
  }
  return picked;
}

std::pair<Graph, GenerationRecord> generate_pa_network(int m, double mu,
                                                       double gamma,
                                                       const NetworkOrder& sigma,
                                                       Rng& rng) {
  if (sigma.size() != m) throw std::invalid_argument("generate_pa_network: sigma size");
  Graph g(m);
  GenerationRecord record;
  g.set_edge(sigma.sigma[0], sigma.sigma[1], true);

  std::vector<int> degrees{1, 1};  // by position within the partial graph
  for (int step = 3; step <= m; ++step) {
    const int x = sample_new_edge_count(step, mu, rng);
    GenerationStep gs;
    gs.step = step;
    gs.new_edges = x;
    gs.weights = attachment_weights(std::span<const int>(degrees), gamma);
    gs.selected = sample_attachment_targets(gs.weights, x, rng);
    for (int pos : gs.selected) {
      g.set_edge(sigma.sigma[step - 1], sigma.sigma[pos], true);
      ++degrees[pos];
    }
    degrees.push_back(x);
    record.push_back(std::move(gs));
  }
  return {std::move(g), std::move(record)};
}

Graph generate_brg(int m, double p, Rng& rng) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("generate_brg: p in [0,1]");
  Graph g(m);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (unif(rng) < p) g.set_edge(i, j, true);
  return g;
}

}  // namespace epinet
