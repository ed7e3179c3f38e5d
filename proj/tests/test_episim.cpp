#include <doctest.h>

#include <cmath>

#include "epinet/episim.hpp"
#include "epinet/netgen.hpp"
#include "oracles.hpp"

using namespace epinet;

namespace {

Graph path3() {
  Graph g(3);
  g.set_edge(0, 1, true);
  g.set_edge(1, 2, true);
  return g;
}

}  // namespace

TEST_CASE("two-node epidemic time is exponential with the edge rate") {
  Rng rng(101);
  Graph g(2);
  g.set_edge(0, 1, true);
  const int n = 100000;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += simulate_si(g, 0.4, 0, rng).times[1];
  CHECK(sum / n == doctest::Approx(2.5).epsilon(0.03 / 2.5));
}

TEST_CASE("complete m=3: two phases at rate 2*beta each") {
  Rng rng(7);
  Graph g(3);
  g.set_edge(0, 1, true);
  g.set_edge(0, 2, true);
  g.set_edge(1, 2, true);
  const int n = 100000;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += simulate_si(g, 0.4, 0, rng).times[2];
  CHECK(sum / n == doctest::Approx(2.5).epsilon(0.03 / 2.5));
}

TEST_CASE("path graph forces the only possible pathway") {
  Rng rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    const SimulatedEpidemic epi = simulate_si(path3(), 1.0, 0, rng);
    CHECK(epi.tree.infector[1] == 0);
    CHECK(epi.tree.infector[2] == 1);
    CHECK(epi.order == std::vector<int>{0, 1, 2});
  }
}

TEST_CASE("disconnected graph is rejected") {
  Graph g(4);
  g.set_edge(0, 1, true);
  g.set_edge(2, 3, true);
  Rng rng(1);
  CHECK_THROWS(simulate_si(g, 0.4, 0, rng));
}

TEST_CASE("tree edges always lie inside the graph") {
  Rng rng(77);
  for (int rep = 0; rep < 100; ++rep) {
    auto [g, rec] = generate_pa_network(20, 2.0, 0.3, NetworkOrder::identity(20), rng);
    const SimulatedEpidemic epi = simulate_si(g, 0.5, 0, rng);
    const Graph relabeled = relabel_graph(g, epi.order);
    for (int j = 1; j < 20; ++j) {
      CHECK(epi.tree.infector[j] < j);
      CHECK(relabeled.has_edge(epi.tree.infector[j], j));
    }
  }
}

TEST_CASE("identical seeds reproduce the epidemic bit for bit") {
  auto run = [] {
    Rng rng(2024);
    auto [g, rec] = generate_pa_network(30, 3.0, 0.1, NetworkOrder::identity(30), rng);
    return simulate_si(g, 0.4, 0, rng);
  };
  const SimulatedEpidemic a = run();
  const SimulatedEpidemic b = run();
  CHECK(a.times == b.times);
  CHECK(a.tree.infector == b.tree.infector);
  CHECK(a.order == b.order);
}

// On the 3-path started at its end, the phase gaps are independent
// exponentials, which is exactly the pairwise SI density for this graph; the
// direct sampler below draws from that density by construction.
TEST_CASE("simulated times match direct density sampling on the 3-path") {
  const double beta = 0.7;
  const int n = 100000;
  Rng rng(55);
  std::vector<double> sim2, sim3, dir2, dir3;
  std::exponential_distribution<double> expo(beta);
  for (int k = 0; k < n; ++k) {
    const SimulatedEpidemic epi = simulate_si(path3(), beta, 0, rng);
    sim2.push_back(epi.times[1]);
    sim3.push_back(epi.times[2]);
    const double t2 = expo(rng);
    const double t3 = t2 + expo(rng);
    dir2.push_back(t2);
    dir3.push_back(t3);
  }
  CHECK(oracle::ks_two_sample_pvalue(sim2, dir2) > 0.001);
  CHECK(oracle::ks_two_sample_pvalue(sim3, dir3) > 0.001);
  std::vector<double> gap_sim(n), gap_dir(n);
  for (int k = 0; k < n; ++k) {
    gap_sim[k] = sim3[k] - sim2[k];
    gap_dir[k] = dir3[k] - dir2[k];
  }
  CHECK(oracle::ks_two_sample_pvalue(gap_sim, gap_dir) > 0.001);
}

TEST_CASE("cumulative curve steps") {
  CHECK(cumulative_curve({0.0, 1.0, 2.0}, {0.5, 1.5, 2.5}) ==
        std::vector<int>{1, 2, 3});
  CHECK(cumulative_curve({0.0, 1.0, 2.0}, {-1.0}) == std::vector<int>{0});
  CHECK(cumulative_curve({0.0, 1.0, 2.0}, {0.0}) == std::vector<int>{1});
  CHECK(cumulative_curve({0.0, 1.0}, {1.0}) == std::vector<int>{2});
  CHECK_THROWS(cumulative_curve({0.0}, {1.0, 0.5}));
}
