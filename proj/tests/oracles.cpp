#include "oracles.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace epinet::oracle {

double censored_pmf_direct(int x, int step, double mu) {
  auto pois = [mu](int z) {
    double term = std::exp(-mu);
    for (int r = 1; r <= z; ++r) term *= mu / r;
    return term;
  };
  if (x == 1) return std::exp(-mu) * (1.0 + mu);
  if (x == step - 1) {
    double lower = 0.0;
    for (int z = 0; z <= step - 2; ++z) lower += pois(z);
    return 1.0 - lower;
  }
  return pois(x);
}

double binomial_tail_direct(int n, double p, int k) {
  double sum = 0.0;
  for (int x = k; x <= n; ++x) {
    double c = 1.0;
    for (int r = 0; r < x; ++r) c = c * (n - r) / (r + 1);
    sum += c * std::pow(p, x) * std::pow(1.0 - p, n - x);
  }
  return sum;
}

namespace {

void wor_walk(const std::vector<double>& w, std::vector<int>& chosen,
              std::vector<char>& used, double remaining, double prob, int left,
              std::vector<double>* inclusion, const std::vector<int>* target_set,
              double* set_prob) {
  if (left == 0) {
    if (inclusion)
      for (int c : chosen) (*inclusion)[c] += prob;
    if (set_prob) {
      std::vector<int> sorted = chosen;
      std::sort(sorted.begin(), sorted.end());
      if (sorted == *target_set) *set_prob += prob;
    }
    return;
  }
  for (int j = 0; j < static_cast<int>(w.size()); ++j) {
    if (used[j] || w[j] <= 0.0) continue;
    used[j] = 1;
    chosen.push_back(j);
    wor_walk(w, chosen, used, remaining - w[j], prob * w[j] / remaining, left - 1,
             inclusion, target_set, set_prob);
    chosen.pop_back();
    used[j] = 0;
  }
}

}  // namespace

std::vector<double> wor_inclusion_probs(const std::vector<double>& weights, int x) {
  std::vector<double> inclusion(weights.size(), 0.0);
  std::vector<int> chosen;
  std::vector<char> used(weights.size(), 0);
  double total = 0.0;
  for (double w : weights) total += w;
  wor_walk(weights, chosen, used, total, 1.0, x, &inclusion, nullptr, nullptr);
  return inclusion;
}

double wor_set_prob(const std::vector<double>& weights, const std::vector<int>& set) {
  std::vector<int> target = set;
  std::sort(target.begin(), target.end());
  std::vector<int> chosen;
  std::vector<char> used(weights.size(), 0);
  double total = 0.0;
  for (double w : weights) total += w;
  double prob = 0.0;
  wor_walk(weights, chosen, used, total, 1.0, static_cast<int>(set.size()), nullptr,
           &target, &prob);
  return prob;
}

std::uint64_t graph_key(const Graph& g) {
  std::uint64_t key = 0;
  int bit = 0;
  for (int i = 0; i < g.m(); ++i)
    for (int j = i + 1; j < g.m(); ++j, ++bit)
      if (g.has_edge(i, j)) key |= (1ULL << bit);
  return key;
}

Graph graph_from_key(std::uint64_t key, int m) {
  Graph g(m);
  int bit = 0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j, ++bit)
      if (key & (1ULL << bit)) g.set_edge(i, j, true);
  return g;
}

namespace {

void pa_enumerate_step(int m, int step, double mu, double gamma,
                       const NetworkOrder& sigma, Graph& g,
                       std::vector<int>& degrees, double prob,
                       std::map<std::uint64_t, double>& pmf) {
  if (step > m) {
    pmf[graph_key(g)] += prob;
    return;
  }
  const int n = step - 1;
  std::vector<double> w(n);
  double total_deg = 0.0;
  for (int d : degrees) total_deg += d;
  const double rank_norm = n * (n + 1) / 2.0;
  for (int j = 0; j < n; ++j)
    w[j] = (1.0 - gamma) * degrees[j] / total_deg + gamma * (j + 1) / rank_norm;

  for (int x = 1; x <= n; ++x) {
    const double px = censored_pmf_direct(x, step, mu);
    // all subsets of size x
    std::vector<int> idx(x);
    for (int k = 0; k < x; ++k) idx[k] = k;
    while (true) {
      const double ps = wor_set_prob(w, idx);
      if (ps > 0.0) {
        for (int s : idx) {
          g.set_edge(sigma.sigma[step - 1], sigma.sigma[s], true);
          ++degrees[s];
        }
        degrees.push_back(x);
        pa_enumerate_step(m, step + 1, mu, gamma, sigma, g, degrees, prob * px * ps,
                          pmf);
        degrees.pop_back();
        for (int s : idx) {
          g.set_edge(sigma.sigma[step - 1], sigma.sigma[s], false);
          --degrees[s];
        }
      }
      // next combination
      int k = x - 1;
      while (k >= 0 && idx[k] == n - x + k) --k;
      if (k < 0) break;
      ++idx[k];
      for (int r = k + 1; r < x; ++r) idx[r] = idx[r - 1] + 1;
    }
  }
}

}  // namespace

std::map<std::uint64_t, double> enumerate_pa_pmf(int m, double mu, double gamma,
                                                 const NetworkOrder& sigma) {
  std::map<std::uint64_t, double> pmf;
  Graph g(m);
  g.set_edge(sigma.sigma[0], sigma.sigma[1], true);
  std::vector<int> degrees{1, 1};
  pa_enumerate_step(m, 3, mu, gamma, sigma, g, degrees, 1.0, pmf);
  return pmf;
}

std::vector<TransmissionTree> enumerate_trees(const Graph& g) {
  const int m = g.m();
  std::vector<std::vector<int>> choices(m);
  for (int j = 1; j < m; ++j)
    for (int i = 0; i < j; ++i)
      if (g.has_edge(i, j)) choices[j].push_back(i);
  for (int j = 1; j < m; ++j)
    if (choices[j].empty()) return {};  // infeasible graph

  std::vector<TransmissionTree> trees;
  std::vector<int> pick(m, 0);
  while (true) {
    TransmissionTree t(m);
    for (int j = 1; j < m; ++j) t.infector[j] = choices[j][pick[j]];
    trees.push_back(t);
    int j = m - 1;
    while (j >= 1 && pick[j] + 1 == static_cast<int>(choices[j].size())) {
      pick[j] = 0;
      --j;
    }
    if (j < 1) break;
    ++pick[j];
  }
  return trees;
}

std::vector<int> prefix_cuts(const Graph& g) {
  const int m = g.m();
  std::vector<int> cuts;
  for (int k = 1; k < m; ++k) {
    int c = 0;
    for (int i = 0; i < k; ++i)
      for (int j = k; j < m; ++j)
        if (g.has_edge(i, j)) ++c;
    cuts.push_back(c);
  }
  return cuts;
}

double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::size_t na = a.size(), nb = b.size();
  double d = 0.0;
  std::size_t ia = 0, ib = 0;
  while (ia < na && ib < nb) {
    const double x = std::min(a[ia], b[ib]);
    while (ia < na && a[ia] <= x) ++ia;
    while (ib < nb && b[ib] <= x) ++ib;
    d = std::max(d, std::abs(ia / double(na) - ib / double(nb)));
  }
  const double ne = std::sqrt(na * nb / double(na + nb));
  const double lambda = (ne + 0.12 + 0.11 / ne) * d;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k)
    p += 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return std::clamp(p, 0.0, 1.0);
}

double chi2_pvalue(double stat, int df) {
  return boost::math::gamma_q(df / 2.0, stat / 2.0);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

double batch_means_se(const std::vector<double>& chain, int n_batches) {
  const std::size_t n = chain.size();
  const std::size_t len = n / n_batches;
  if (len < 2) throw std::invalid_argument("batch_means_se: chain too short");
  std::vector<double> means;
  for (int b = 0; b < n_batches; ++b) {
    double s = 0.0;
    for (std::size_t k = b * len; k < (b + 1) * len; ++k) s += chain[k];
    means.push_back(s / len);
  }
  const double grand = mean_of(means);
  double var = 0.0;
  for (double m : means) var += (m - grand) * (m - grand);
  var /= (n_batches - 1);
  return std::sqrt(var / n_batches);
}

}  // namespace epinet::oracle
