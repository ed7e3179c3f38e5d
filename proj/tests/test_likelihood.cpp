#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "epinet/likelihood.hpp"
#include "epinet/netgen.hpp"
#include "oracles.hpp"

using namespace epinet;

namespace {

Graph graph_of(int m, std::initializer_list<std::pair<int, int>> edges) {
  Graph g(m);
  for (const auto& [i, j] : edges) g.set_edge(i, j, true);
  return g;
}

TransmissionTree tree_of(std::initializer_list<int> infectors) {
  TransmissionTree t(static_cast<int>(infectors.size()) + 1);
  int j = 1;
  for (int i : infectors) t.infector[j++] = i;
  return t;
}

// x_i sequence of a graph under an entry order, by brute force
std::vector<int> edge_counts(const Graph& g, const NetworkOrder& sigma) {
  std::vector<int> x;
  for (int p = 2; p < g.m(); ++p) {
    int c = 0;
    for (int j = 0; j < p; ++j)
      if (g.has_edge(sigma.sigma[p], sigma.sigma[j])) ++c;
    x.push_back(c);
  }
  return x;
}

// the factored network likelihood coded literally, as an independent second
// route for the cancellation identity
double direct_network_loglik(const Graph& g, const NetworkOrder& sigma, double mu,
                             double gamma) {
  const int m = g.m();
  if (!g.has_edge(sigma.sigma[0], sigma.sigma[1])) return kNegInf;
  const std::vector<int> x = edge_counts(g, sigma);
  for (int v : x)
    if (v == 0) return kNegInf;

  double value = -(m - 2) * mu + (g.edge_count() - 1) * std::log(mu);
  for (int p = 2; p < m; ++p) {
    const int xi = x[p - 2];
    if (xi == 1) value += std::log1p(mu) - std::log(mu);
    if (xi == p) {
      // [sum_{z>=i-1} mu^z/z!] / [mu^{i-1}/(i-1)!], by direct series
      double series = 0.0, term = 1.0;
      for (int r = 0; r < 10000; ++r) {
        series += term;
        term *= mu / (p + 1 + r);
        if (term < 1e-19 * series) break;
      }
      value += std::log(series);
    }
    const std::vector<double> w = attachment_weights(g, sigma, p + 1, gamma);
    double pref = 0.0;
    for (int j = 0; j < p; ++j) {
      if (g.has_edge(sigma.sigma[p], sigma.sigma[j])) {
        if (w[j] <= 0.0) return kNegInf;
        value += std::log(w[j]) - std::log(1.0 - pref);
      }
      pref += w[j];
    }
  }
  return value;
}

struct RandomInstance {
  Graph g;
  NetworkOrder sigma;
  double mu, gamma;
};

RandomInstance random_instance(int m, Rng& rng) {
  NetworkOrder sigma = NetworkOrder::identity(m);
  std::shuffle(sigma.sigma.begin(), sigma.sigma.end(), rng);
  std::uniform_real_distribution<double> mu_d(0.4, 5.0), gamma_d(0.0, 1.0);
  const double mu = mu_d(rng), gamma = gamma_d(rng);
  auto [g, rec] = generate_pa_network(m, mu, gamma, sigma, rng);
  return {std::move(g), std::move(sigma), mu, gamma};
}

}  // namespace

TEST_CASE("tree probability: worked examples") {
  const Graph complete = graph_of(3, {{0, 1}, {0, 2}, {1, 2}});
  CHECK(log_tree_given_graph(tree_of({0, 0}), complete) ==
        doctest::Approx(std::log(0.5)).epsilon(1e-14));

  const Graph path = graph_of(3, {{0, 1}, {1, 2}});
  CHECK(log_tree_given_graph(tree_of({0, 1}), path) == doctest::Approx(0.0));

  const Graph no13 = graph_of(3, {{0, 1}, {1, 2}});
  CHECK(log_tree_given_graph(tree_of({0, 0}), no13) == kNegInf);
}

TEST_CASE("tree probability normalizes over enumerated pathways, m <= 6") {
  for (int m = 2; m <= 6; ++m) {
    const int n_pairs = m * (m - 1) / 2;
    for (std::uint64_t key = 0; key < (1ULL << n_pairs); ++key) {
      const Graph g = oracle::graph_from_key(key, m);
      const auto trees = oracle::enumerate_trees(g);
      if (trees.empty()) continue;  // some node has no earlier neighbour
      double sum = 0.0;
      for (const auto& t : trees) sum += std::exp(log_tree_given_graph(t, g));
      REQUIRE(sum == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("si edge-time sum and single-toggle updates") {
  Graph g(3);
  CHECK(si_edge_time_sum(g, {0.0, 1.0, 2.0}) == 0.0);
  g.set_edge(0, 1, true);
  g.set_edge(0, 2, true);
  g.set_edge(1, 2, true);
  CHECK(si_edge_time_sum(g, {0.0, 1.0, 2.0}) == doctest::Approx(4.0));
  g.set_edge(0, 2, false);
  CHECK(si_edge_time_sum(g, {0.0, 1.0, 2.0}) == doctest::Approx(2.0));

  Rng rng(5);
  auto [big, rec] = generate_pa_network(25, 2.0, 0.5, NetworkOrder::identity(25), rng);
  std::vector<double> times(25);
  for (int j = 1; j < 25; ++j) times[j] = times[j - 1] + 0.1 + (rng() % 100) / 50.0;
  double incremental = si_edge_time_sum(big, times);
  for (int rep = 0; rep < 300; ++rep) {
    const int i = static_cast<int>(rng() % 25);
    int j = static_cast<int>(rng() % 25);
    if (i == j) continue;
    const double gap = std::abs(times[j] - times[i]);
    incremental += big.has_edge(i, j) ? -gap : gap;
    big.toggle_edge(i, j);
    REQUIRE(incremental ==
            doctest::Approx(si_edge_time_sum(big, times)).epsilon(1e-12));
  }
}

TEST_CASE("times density: worked examples") {
  Graph g2(2);
  g2.set_edge(0, 1, true);
  CHECK(log_times_given_graph({0.0, 2.0}, g2, 0.4) ==
        doctest::Approx(-1.7162907318741551).epsilon(1e-14));

  const Graph complete = graph_of(3, {{0, 1}, {0, 2}, {1, 2}});
  CHECK(log_times_given_graph({0.0, 1.0, 2.0}, complete, 0.4) ==
        doctest::Approx(2 * std::log(0.4) - 1.6).epsilon(1e-14));
}

TEST_CASE("times density integrates to one over the ordered simplex") {
  // m=2 single edge: 1-D Simpson over [0, T]
  {
    Graph g(2);
    g.set_edge(0, 1, true);
    const double beta = 0.7, T = 60.0 / beta;
    const int n = 4096;
    const double h = T / n;
    double integral = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double t = k * h;
      const double f = std::exp(log_times_given_graph({0.0, t}, g, beta));
      integral += f * ((k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2));
    }
    integral *= h / 3.0;
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
  }
  // m=3 path 1-2-3: nested Simpson over 0 < t2 < t3 < T
  {
    const Graph path = graph_of(3, {{0, 1}, {1, 2}});
    const double beta = 0.7, T = 70.0 / beta;
    const int n3 = 3000;
    const double h3 = T / n3;
    double integral = 0.0;
    for (int k3 = 0; k3 <= n3; ++k3) {
      const double t3 = k3 * h3;
      double inner = 0.0;
      const int n_in = 400;
      if (t3 > 0) {
        const double h2 = t3 / n_in;
        for (int k2 = 0; k2 <= n_in; ++k2) {
          const double t2 = k2 * h2;
          const double f =
              std::exp(log_times_given_graph({0.0, t2, t3}, path, beta));
          inner += f * ((k2 == 0 || k2 == n_in) ? 1 : (k2 % 2 ? 4 : 2));
        }
        inner *= h2 / 3.0;
      }
      integral += inner * ((k3 == 0 || k3 == n3) ? 1 : (k3 % 2 ? 4 : 2));
    }
    integral *= h3 / 3.0;
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("L1: worked example equals the pmf it factors") {
  // identity order, G = {12, 13}: x_3 = 1
  const Graph g = graph_of(3, {{0, 1}, {0, 2}});
  const double got = log_l1(g, NetworkOrder::identity(3), 4.0);
  CHECK(got == doctest::Approx(std::log(0.09157819444367090)).epsilon(1e-12));
  CHECK(got == doctest::Approx(-2.3905620875658996).epsilon(1e-12));
  CHECK(got ==
        doctest::Approx(log_censored_poisson_pmf(1, 3, 4.0)).epsilon(1e-14));
}

TEST_CASE("L1 vanishes when an entrant connects to nothing") {
  Graph g = graph_of(4, {{0, 1}, {0, 3}, {1, 3}});  // entrant 3 isolated so far
  CHECK(log_l1(g, NetworkOrder::identity(4), 2.0) == kNegInf);
}

TEST_CASE("L1 equals the censored-pmf product on random instances") {
  Rng rng(41);
  for (int rep = 0; rep < 100; ++rep) {
    const int m = 3 + static_cast<int>(rng() % 6);
    const RandomInstance inst = random_instance(m, rng);
    const std::vector<int> x = edge_counts(inst.g, inst.sigma);
    double expect = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k)
      expect += std::log(oracle::censored_pmf_direct(x[k], static_cast<int>(k) + 3,
                                                     inst.mu));
    REQUIRE(log_l1(inst.g, inst.sigma, inst.mu) ==
            doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("L2 approx: worked examples at m=3") {
  const Graph g = graph_of(3, {{0, 1}, {0, 2}});
  CHECK(log_l2_approx(g, NetworkOrder::identity(3), 0.0) ==
        doctest::Approx(std::log(0.5)).epsilon(1e-14));
  CHECK(log_l2_approx(g, NetworkOrder::identity(3), 1.0) ==
        doctest::Approx(std::log(1.0 / 3)).epsilon(1e-14));

  const Graph both = graph_of(3, {{0, 1}, {0, 2}, {1, 2}});
  CHECK(log_l2_approx(both, NetworkOrder::identity(3), 0.0) ==
        doctest::Approx(0.0).epsilon(1e-14));
}

// The printed one-permutation form keeps every earlier weight in its
// denominators, so it upper-bounds the exact single-draw probability when
// each step adds one edge, with equality when entrants attach to the first
// position (nothing sits below the drawn weight).
TEST_CASE("L2 approx bounds exact for single-edge steps; star attains it") {
  Rng rng(19);
  for (int rep = 0; rep < 50; ++rep) {
    const int m = 3 + static_cast<int>(rng() % 6);
    NetworkOrder sigma = NetworkOrder::identity(m);
    std::shuffle(sigma.sigma.begin(), sigma.sigma.end(), rng);
    std::uniform_real_distribution<double> gamma_d(0.0, 1.0);
    const double gamma = gamma_d(rng);
    auto [g, rec] = generate_pa_network(m, 0.0, gamma, sigma, rng);  // tree: x == 1
    REQUIRE(log_l2_approx(g, sigma, gamma) >=
            log_l2_exact(g, sigma, gamma) - 1e-12);
  }

  for (int m : {4, 7}) {
    const NetworkOrder sigma = NetworkOrder::identity(m);
    Graph star(m);
    for (int j = 1; j < m; ++j) star.set_edge(0, j, true);
    for (double gamma : {0.0, 0.4, 1.0}) {
      REQUIRE(log_l2_approx(star, sigma, gamma) ==
              doctest::Approx(log_l2_exact(star, sigma, gamma)).epsilon(1e-12));
    }
  }
}

TEST_CASE("L2 exact: hand-enumerated two-permutation averages at m=4") {
  const double gamma = 0.3;
  // step 3 weights: degrees (1,1) -> w = (0.45, 0.55)
  // step 4 weights: degrees (2,1,1) -> w = (0.4, 0.275, 0.325)
  {
    // entrant 3 -> {1}; entrant 4 -> {1,2}
    const Graph g = graph_of(4, {{0, 1}, {0, 2}, {0, 3}, {1, 3}});
    const double step3 = 0.45;
    const double step4 = 0.4 * 0.275 / (1 - 0.4) + 0.275 * 0.4 / (1 - 0.275);
    CHECK(log_l2_exact(g, NetworkOrder::identity(4), gamma) ==
          doctest::Approx(std::log(step3) + std::log(step4)).epsilon(1e-12));
    // the one-permutation form keeps the printed all-weights denominator
    const double approx4 = 2.0 * 0.4 * 0.275 / (1 - 0.4);
    CHECK(log_l2_approx(g, NetworkOrder::identity(4), gamma) ==
          doctest::Approx(std::log(step3) + std::log(approx4)).epsilon(1e-12));
  }
  {
    // entrant 4 -> {1,3}: an unselected weight now sits below a selected one,
    // so the printed denominator differs from the drawn-weights denominator
    const Graph g = graph_of(4, {{0, 1}, {0, 2}, {0, 3}, {2, 3}});
    const double step3 = 0.45;
    const double exact4 = 0.4 * 0.325 / (1 - 0.4) + 0.325 * 0.4 / (1 - 0.325);
    const double approx4 = 2.0 * 0.4 * 0.325 / (1 - 0.4 - 0.275);
    CHECK(log_l2_exact(g, NetworkOrder::identity(4), gamma) ==
          doctest::Approx(std::log(step3) + std::log(exact4)).epsilon(1e-12));
    CHECK(log_l2_approx(g, NetworkOrder::identity(4), gamma) ==
          doctest::Approx(std::log(step3) + std::log(approx4)).epsilon(1e-12));
  }
}

TEST_CASE("L2 exact factorial guard") {
  Rng rng(1);
  auto [g, rec] = generate_pa_network(12, 11.5, 0.0, NetworkOrder::identity(12), rng);
  bool big = false;
  for (const auto& s : rec) big |= s.new_edges > 8;
  if (big) CHECK_THROWS(log_l2_exact(g, NetworkOrder::identity(12), 0.0));
}

TEST_CASE("exact network pmf normalizes over admissible graphs at m=4") {
  const int m = 4;
  const double mu = 1.0, gamma = 0.3;
  const NetworkOrder sigma = NetworkOrder::identity(m);
  double sum = 0.0;
  for (std::uint64_t key = 0; key < (1ULL << 6); ++key) {
    const Graph g = oracle::graph_from_key(key, m);
    const double value = log_network_given_params(g, sigma, mu, gamma, L2Mode::exact);
    if (value != kNegInf) sum += std::exp(value);
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("exact likelihood equals the generator enumeration oracle at m=4") {
  const int m = 4;
  const double mu = 1.0, gamma = 0.3;
  const NetworkOrder sigma = NetworkOrder::identity(m);
  const auto pmf = oracle::enumerate_pa_pmf(m, mu, gamma, sigma);
  for (const auto& [key, prob] : pmf) {
    const Graph g = oracle::graph_from_key(key, m);
    REQUIRE(std::exp(log_network_given_params(g, sigma, mu, gamma, L2Mode::exact)) ==
            doctest::Approx(prob).epsilon(1e-10));
  }
}

TEST_CASE("component sum equals the directly-coded factored form") {
  Rng rng(59);
  for (int rep = 0; rep < 100; ++rep) {
    const int m = 3 + static_cast<int>(rng() % 8);
    const RandomInstance inst = random_instance(m, rng);
    const double via_components =
        log_l1(inst.g, inst.sigma, inst.mu) +
        log_l2_approx(inst.g, inst.sigma, inst.gamma);
    const double direct = direct_network_loglik(inst.g, inst.sigma, inst.mu, inst.gamma);
    REQUIRE(via_components == doctest::Approx(direct).epsilon(1e-12));
    REQUIRE(log_network_given_params(inst.g, inst.sigma, inst.mu, inst.gamma) ==
            doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("network likelihood base cases") {
  Graph g2(2);
  g2.set_edge(0, 1, true);
  CHECK(log_network_given_params(g2, NetworkOrder::identity(2), 2.0, 0.3) ==
        doctest::Approx(0.0));

  Rng rng(8);
  auto [tree, rec] = generate_pa_network(10, 0.0, 0.0, NetworkOrder::identity(10), rng);
  const double at_small = log_network_given_params(tree, NetworkOrder::identity(10), 0.1, 0.0);
  const double at_large = log_network_given_params(tree, NetworkOrder::identity(10), 10.0, 0.0);
  CHECK(at_small > at_large);  // trees are likelier under small mu
}

TEST_CASE("joint kernel: zero-probability and reduction cases") {
  EpidemicData data;
  data.m = 3;
  data.times = {0.0, 1.0, 2.0};
  data.tree = tree_of({0, 0});
  const Priors priors;

  Graph g = graph_of(3, {{0, 1}, {1, 2}});  // tree edge {1,3} missing
  CHECK(log_joint(g, NetworkOrder::identity(3), {0.4, 1.0, 0.0}, data, priors) ==
        kNegInf);

  EpidemicData tiny;
  tiny.m = 2;
  tiny.times = {0.0, 2.0};
  tiny.tree = tree_of({0});
  Graph g2(2);
  g2.set_edge(0, 1, true);
  const ParamState params{0.4, 1.5, 0.2};
  const double expect =
      log_times_given_graph(tiny.times, g2, params.beta) +
      priors.a_beta * std::log(priors.b_beta) - std::lgamma(priors.a_beta) +
      (priors.a_beta - 1) * std::log(params.beta) - priors.b_beta * params.beta +
      priors.a_mu * std::log(priors.b_mu) - std::lgamma(priors.a_mu) +
      (priors.a_mu - 1) * std::log(params.mu) - priors.b_mu * params.mu -
      std::lgamma(3.0);
  CHECK(log_joint(g2, NetworkOrder::identity(2), params, tiny, priors) ==
        doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("joint kernel is invariant to the order on a symmetric graph") {
  EpidemicData data;
  data.m = 4;
  data.times = {0.0, 0.5, 1.25, 3.0};
  data.tree = tree_of({0, 1, 0});
  Graph complete(4);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) complete.set_edge(i, j, true);

  NetworkOrder sigma = NetworkOrder::identity(4);
  const double reference =
      log_joint(complete, sigma, {0.4, 2.0, 0.3}, data, Priors{});
  std::sort(sigma.sigma.begin(), sigma.sigma.end());
  do {
    CHECK(log_joint(complete, sigma, {0.4, 2.0, 0.3}, data, Priors{}) ==
          doctest::Approx(reference).epsilon(1e-12));
  } while (std::next_permutation(sigma.sigma.begin(), sigma.sigma.end()));
}

TEST_CASE("integrated-beta kernel values") {
  const Priors priors;  // a_beta = 1, b_beta = 0.001
  CHECK(log_integrated_beta_kernel(3, 4.0, priors) ==
        doctest::Approx(-3.0 * std::log(4.001)).epsilon(1e-14));
  CHECK(log_integrated_beta_kernel(3, 4.0, priors) ==
        doctest::Approx(-4.159632989625294).epsilon(1e-12));
  // adding an edge with gap 2 moves the argument from 4.001 to 6.001
  CHECK(log_integrated_beta_kernel(3, 6.0, priors) ==
        doctest::Approx(-3.0 * std::log(6.001)).epsilon(1e-14));

  // huge prior rate swamps the data: graph differences vanish
  Priors flat;
  flat.b_beta = 1e12;
  const double a = log_integrated_beta_kernel(5, 3.0, flat);
  const double b = log_integrated_beta_kernel(5, 9.0, flat);
  CHECK(std::abs(a - b) < 1e-10 * std::abs(a));
}
