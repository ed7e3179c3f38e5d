#ifndef EPINET_MCMC_HPP
#define EPINET_MCMC_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "epinet/likelihood.hpp"
#include "epinet/rng.hpp"
#include "epinet/types.hpp"

namespace epinet {

enum class Model { pa, brg };

struct McmcConfig {
  int iterations = 20000;
  int burnin = 10000;
  std::optional<double> fix_gamma = 0.0;  // nullopt -> gamma estimated
  double target_accept = 0.44;
  std::optional<double> init_mu;   // default: max(0.5, mean tree degree - 1)
  double init_gamma = 0.5;         // used when gamma is free
  double proposal_sd_mu = 0.5;
  double proposal_sd_gamma = 0.25;
  int sigma_moves_per_iter = 0;    // 0 -> m
  std::uint64_t seed = 1;
  Model model = Model::pa;
  int thin = 1;
  bool random_scan = false;        // edge-sweep order; fixed lexicographic by default
  int adapt_batch = 50;
  int record_sigma_every = 0;      // 0 -> off
  L2Mode l2_mode = L2Mode::approx; // exact is test-only (factorial guard)
};

struct Trace {
  int m = 0;
  std::vector<int> iter;
  std::vector<double> beta;
  std::vector<double> mu;
  std::vector<double> gamma;
  std::vector<double> p;  // BRG only; empty for the PA model
  std::vector<double> log_joint;
  std::vector<std::uint64_t> edge_tally;  // triangular, pair_index order
  std::vector<std::vector<int>> sigma_samples;

  std::uint64_t mu_proposals = 0, mu_accepts = 0;
  std::uint64_t gamma_proposals = 0, gamma_accepts = 0;
  std::uint64_t sigma_proposals = 0, sigma_accepts = 0;

  int kept_n() const { return static_cast<int>(beta.size()); }
};

// triangular index of unordered pair {i<j} within m nodes
inline std::size_t pair_index(int i, int j, int m) {
  return static_cast<std::size_t>(i) * (2 * m - i - 1) / 2 + (j - i - 1);
}

// Current sampler position plus every cached quantity the kernels update
// incrementally. rebuild_cache() re-derives all of them from scratch.
struct ChainState {
  ParamState params;
  NetworkOrder sigma;
  Graph g;
  L2Mode l2_mode = L2Mode::approx;

  double si_sum = 0.0;
  double log_tree = 0.0;
  std::vector<int> n_earlier;  // per node: #neighbours with smaller label
  NetworkLoglik net;

  void rebuild_cache(const EpidemicData& data, NetworkEvaluator& eval);
};

// --- kernels -------------------------------------------------------------

// Gamma(a_beta + m - 1, b_beta + si_sum) full conditional.
double gibbs_beta(ChainState& state, const EpidemicData& data,
                  const Priors& priors, Rng& rng);

bool rwm_mu(ChainState& state, const Priors& priors, double proposal_sd,
            Rng& rng);

bool rwm_gamma(ChainState& state, NetworkEvaluator& eval, double proposal_sd,
               Rng& rng);

// Random walk by insertion: element at position i moved to position j,
// i and j uniform with replacement. Symmetric on the permutation space.
NetworkOrder propose_sigma_insertion(const NetworkOrder& sigma, Rng& rng);

// n_moves individual Metropolis steps on the entry order.
void update_sigma(ChainState& state, NetworkEvaluator& eval, int n_moves,
                  Rng& rng, std::uint64_t* proposals = nullptr,
                  std::uint64_t* accepts = nullptr);

// Beta-integrated two-point Gibbs draw for one unclamped pair {s<t}
// (epidemic labels, so times[s] < times[t]). Returns the sampled value.
bool gibbs_edge(ChainState& state, const EpidemicData& data,
                const Priors& priors, int s, int t, NetworkEvaluator& eval,
                Rng& rng);

// Full pass over unordered pairs; tree pairs and known_edges are skipped.
void sweep_edges(ChainState& state, const EpidemicData& data,
                 const Priors& priors, NetworkEvaluator& eval, Rng& rng,
                 bool random_scan = false);

// Robbins-Monro scale update, burn-in only:
// sd * exp(min(0.25, batch^-1/2) * (rate - target)).
double adapt_proposal_sd(double sd, double batch_accept_rate, double target,
                         int batch_index);

ChainState init_chain_state(const EpidemicData& data, const Priors& priors,
                            const McmcConfig& cfg, NetworkEvaluator& eval,
                            Rng& rng);

Trace run_chain(const EpidemicData& data, const Priors& priors,
                const McmcConfig& cfg);

// BRG baseline: same beta Gibbs and edge-sweep skeleton with the
// p^{|G|}(1-p)^{C(m,2)-|G|} network prior; p re-drawn by conjugate Beta Gibbs.
Trace run_brg_chain(const EpidemicData& data, const BrgParams& brg,
                    const Priors& priors, const McmcConfig& cfg);

}  // namespace epinet

#endif
