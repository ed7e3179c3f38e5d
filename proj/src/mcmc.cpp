#include "epinet/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace epinet {

namespace {

double log_gamma_prior_kernel(double x, double shape, double rate) {
  return (shape - 1.0) * std::log(x) - rate * x;
}

double sample_gamma(double shape, double rate, Rng& rng) {
  std::gamma_distribution<double> dist(shape, 1.0 / rate);
  return dist(rng);
}

double sample_beta_dist(double a, double b, Rng& rng) {
  const double x = sample_gamma(a, 1.0, rng);
  const double y = sample_gamma(b, 1.0, rng);
  return x / (x + y);
}

// accept probability from two log-kernels; handles -inf branches
double prob_branch_one(double logk0, double logk1) {
  if (logk1 == kNegInf && logk0 == kNegInf)
    throw std::logic_error("gibbs_edge: both branches have zero probability");
  if (logk1 == kNegInf) return 0.0;
  if (logk0 == kNegInf) return 1.0;
  return 1.0 / (1.0 + std::exp(logk0 - logk1));
}

NetworkLoglik eval_network(const ChainState& state, NetworkEvaluator& eval,
                           const Graph& g, const NetworkOrder& sigma, double mu,
                           double gamma) {
  NetworkLoglik out = eval.evaluate(g, sigma, mu, gamma);
  if (state.l2_mode == L2Mode::exact && out.stats.feasible)
    out.log_l2 = log_l2_exact(g, sigma, gamma);
  return out;
}

}  // namespace

void ChainState::rebuild_cache(const EpidemicData& data, NetworkEvaluator& eval) {
  si_sum = si_edge_time_sum(g, data.times);
  n_earlier.assign(g.m(), 0);
  for (int j = 1; j < g.m(); ++j) {
    const std::uint8_t* row = g.row_ptr(j);
    int n = 0;
    for (int i = 0; i < j; ++i) n += row[i];
    n_earlier[j] = n;
  }
  log_tree = log_tree_given_graph(data.tree, g);
  net = eval_network(*this, eval, g, sigma, params.mu, params.gamma);
}

double gibbs_beta(ChainState& state, const EpidemicData& data,
                  const Priors& priors, Rng& rng) {
  const double shape = priors.a_beta + data.m - 1;
  const double rate = priors.b_beta + state.si_sum;
  state.params.beta = sample_gamma(shape, rate, rng);
  return state.params.beta;
}

bool rwm_mu(ChainState& state, const Priors& priors, double proposal_sd, Rng& rng) {
  std::normal_distribution<double> step(0.0, proposal_sd);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double proposal = state.params.mu + step(rng);
  const double u = unif(rng);
  if (proposal <= 0.0) return false;
  const double l1_new = log_l1_from_stats(state.net.stats, proposal);
  const double log_ratio =
      l1_new + log_gamma_prior_kernel(proposal, priors.a_mu, priors.b_mu) -
      state.net.log_l1 -
      log_gamma_prior_kernel(state.params.mu, priors.a_mu, priors.b_mu);
  if (std::log(u) < log_ratio) {
    state.params.mu = proposal;
    state.net.log_l1 = l1_new;
    return true;
  }
  return false;
}

bool rwm_gamma(ChainState& state, NetworkEvaluator& eval, double proposal_sd,
               Rng& rng) {
  std::normal_distribution<double> step(0.0, proposal_sd);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double proposal = state.params.gamma + step(rng);
  const double u = unif(rng);
  if (proposal < 0.0 || proposal > 1.0) return false;
  NetworkLoglik net_new =
      eval_network(state, eval, state.g, state.sigma, state.params.mu, proposal);
  const double log_ratio = net_new.log_l2 - state.net.log_l2;
  if (std::log(u) < log_ratio) {
    state.params.gamma = proposal;
    state.net = std::move(net_new);
    return true;
  }
  return false;
}

NetworkOrder propose_sigma_insertion(const NetworkOrder& sigma, Rng& rng) {
  const int m = sigma.size();
  std::uniform_int_distribution<int> pick(0, m - 1);
  const int i = pick(rng);
  const int j = pick(rng);
  NetworkOrder proposal = sigma;
  const int moved = proposal.sigma[i];
  proposal.sigma.erase(proposal.sigma.begin() + i);
  proposal.sigma.insert(proposal.sigma.begin() + j, moved);
  return proposal;
}

void update_sigma(ChainState& state, NetworkEvaluator& eval, int n_moves, Rng& rng,
                  std::uint64_t* proposals, std::uint64_t* accepts) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int move = 0; move < n_moves; ++move) {
    NetworkOrder proposal = propose_sigma_insertion(state.sigma, rng);
    NetworkLoglik net_new = eval_network(state, eval, state.g, proposal,
                                         state.params.mu, state.params.gamma);
    const double u = unif(rng);
    if (proposals) ++*proposals;
    const double log_ratio = net_new.total() - state.net.total();
    if (std::log(u) < log_ratio) {
      state.sigma = std::move(proposal);
      state.net = std::move(net_new);
      if (accepts) ++*accepts;
    }
  }
}

bool gibbs_edge(ChainState& state, const EpidemicData& data, const Priors& priors,
                int s, int t, NetworkEvaluator& eval, Rng& rng) {
  const bool cur = state.g.has_edge(s, t);
  const double gap = data.times[t] - data.times[s];

  state.g.toggle_edge(s, t);
  NetworkLoglik net_alt = eval_network(state, eval, state.g, state.sigma,
                                       state.params.mu, state.params.gamma);
  state.g.toggle_edge(s, t);

  const NetworkLoglik& net0 = cur ? net_alt : state.net;
  const NetworkLoglik& net1 = cur ? state.net : net_alt;
  const double si0 = state.si_sum - (cur ? gap : 0.0);
  const int n_t0 = state.n_earlier[t] - (cur ? 1 : 0);

  double logk0 = net0.total();
  if (n_t0 == 0)
    logk0 = kNegInf;
  else if (logk0 != kNegInf)
    logk0 += -std::log(static_cast<double>(n_t0)) +
             log_integrated_beta_kernel(data.m, si0, priors);
  double logk1 = net1.total();
  if (logk1 != kNegInf)
    logk1 += -std::log(static_cast<double>(n_t0 + 1)) +
             log_integrated_beta_kernel(data.m, si0 + gap, priors);

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const bool value = unif(rng) < prob_branch_one(logk0, logk1);
  if (value != cur) {
    state.g.toggle_edge(s, t);
    state.si_sum = value ? si0 + gap : si0;
    const int n_old = state.n_earlier[t];
    const int n_new = value ? n_t0 + 1 : n_t0;
    state.n_earlier[t] = n_new;
    state.log_tree += std::log(static_cast<double>(n_old)) -
                      std::log(static_cast<double>(n_new));
    state.net = std::move(net_alt);
  }
  return value;
}

void sweep_edges(ChainState& state, const EpidemicData& data, const Priors& priors,
                 NetworkEvaluator& eval, Rng& rng, bool random_scan) {
  const int m = data.m;
  static thread_local std::vector<std::pair<int, int>> pairs;
  pairs.clear();
  for (int s = 0; s < m; ++s)
    for (int t = s + 1; t < m; ++t) {
      if (data.tree.has_edge(s, t)) continue;
      if (data.known_edges.is_clamped(s, t)) continue;
      pairs.emplace_back(s, t);
    }
  if (random_scan) std::shuffle(pairs.begin(), pairs.end(), rng);
  for (const auto& [s, t] : pairs) gibbs_edge(state, data, priors, s, t, eval, rng);
}

double adapt_proposal_sd(double sd, double batch_accept_rate, double target,
                         int batch_index) {
  const double delta = std::min(0.25, 1.0 / std::sqrt(static_cast<double>(batch_index)));
  return sd * std::exp(delta * (batch_accept_rate - target));
}

ChainState init_chain_state(const EpidemicData& data, const Priors& priors,
                            const McmcConfig& cfg, NetworkEvaluator& eval, Rng& rng) {
  ChainState state;
  state.g = Graph(data.m);
  for (int j = 1; j < data.m; ++j)
    state.g.set_edge(data.tree.infector[j], j, true);
  if (!data.known_edges.empty()) {
    for (int s = 0; s < data.m; ++s)
      for (int t = s + 1; t < data.m; ++t)
        if (data.known_edges.state(s, t) == 1) state.g.set_edge(s, t, true);
  }
  state.sigma = NetworkOrder::identity(data.m);

  const double mean_tree_degree = 2.0 * (data.m - 1) / data.m;
  state.params.mu = cfg.init_mu.value_or(std::max(0.5, mean_tree_degree - 1.0));
  state.params.gamma = cfg.fix_gamma.value_or(cfg.init_gamma);
  state.l2_mode = cfg.l2_mode;

  state.rebuild_cache(data, eval);
  gibbs_beta(state, data, priors, rng);
  return state;
}

namespace {

void require_valid(const EpidemicData& data, const McmcConfig& cfg) {
  if (cfg.iterations <= cfg.burnin)
    throw std::invalid_argument("McmcConfig: iterations must exceed burnin");
  if (cfg.burnin < 0 || cfg.thin < 1)
    throw std::invalid_argument("McmcConfig: bad burnin/thin");
  ValidationReport report = validate_dataset(data);
  if (!report.ok()) {
    std::ostringstream os;
    os << "invalid dataset:";
    for (const auto& v : report.violations) os << "\n  - " << v;
    throw std::invalid_argument(os.str());
  }
}

void tally_edges(Trace& trace, const Graph& g) {
  const int m = g.m();
  std::size_t k = 0;
  for (int i = 0; i < m; ++i) {
    const std::uint8_t* row = g.row_ptr(i);
    for (int j = i + 1; j < m; ++j) trace.edge_tally[k++] += row[j];
  }
}

}  // namespace

Trace run_chain(const EpidemicData& data, const Priors& priors,
                const McmcConfig& cfg) {
  require_valid(data, cfg);
  const int m = data.m;
  Rng rng(cfg.seed);
  NetworkEvaluator eval(m);
  ChainState state = init_chain_state(data, priors, cfg, eval, rng);
  const bool gamma_free = !cfg.fix_gamma.has_value();
  const int sigma_moves = cfg.sigma_moves_per_iter > 0 ? cfg.sigma_moves_per_iter : m;

  Trace trace;
  trace.m = m;
  trace.edge_tally.assign(static_cast<std::size_t>(m) * (m - 1) / 2, 0);

  double sd_mu = cfg.proposal_sd_mu;
  double sd_gamma = cfg.proposal_sd_gamma;
  int batch_mu_accepts = 0, batch_gamma_accepts = 0;

  const double log_m_factorial = std::lgamma(m + 1.0);
  for (int it = 0; it < cfg.iterations; ++it) {
    gibbs_beta(state, data, priors, rng);

    ++trace.mu_proposals;
    const bool mu_ok = rwm_mu(state, priors, sd_mu, rng);
    trace.mu_accepts += mu_ok;
    batch_mu_accepts += mu_ok;

    if (gamma_free) {
      ++trace.gamma_proposals;
      const bool gamma_ok = rwm_gamma(state, eval, sd_gamma, rng);
      trace.gamma_accepts += gamma_ok;
      batch_gamma_accepts += gamma_ok;
    }

    update_sigma(state, eval, sigma_moves, rng, &trace.sigma_proposals,
                 &trace.sigma_accepts);
    sweep_edges(state, data, priors, eval, rng, cfg.random_scan);

    if (it < cfg.burnin && (it + 1) % cfg.adapt_batch == 0) {
      const int batch_index = (it + 1) / cfg.adapt_batch;
      sd_mu = adapt_proposal_sd(sd_mu, batch_mu_accepts / double(cfg.adapt_batch),
                                cfg.target_accept, batch_index);
      batch_mu_accepts = 0;
      if (gamma_free) {
        sd_gamma = adapt_proposal_sd(
            sd_gamma, batch_gamma_accepts / double(cfg.adapt_batch),
            cfg.target_accept, batch_index);
        batch_gamma_accepts = 0;
      }
    }

    if ((it + 1) % 1000 == 0) {  // kill fp drift in the incremental caches
      state.si_sum = si_edge_time_sum(state.g, data.times);
      state.log_tree = log_tree_given_graph(data.tree, state.g);
    }

    if (it >= cfg.burnin && (it - cfg.burnin) % cfg.thin == 0) {
      trace.iter.push_back(it);
      trace.beta.push_back(state.params.beta);
      trace.mu.push_back(state.params.mu);
      trace.gamma.push_back(state.params.gamma);
      const double lj =
          state.log_tree +
          log_times_given_graph(data.times, state.g, state.params.beta) +
          state.net.total() +
          (priors.a_beta - 1.0) * std::log(state.params.beta) -
          priors.b_beta * state.params.beta +
          (priors.a_mu - 1.0) * std::log(state.params.mu) -
          priors.b_mu * state.params.mu - log_m_factorial;
      trace.log_joint.push_back(lj);
      tally_edges(trace, state.g);
      if (cfg.record_sigma_every > 0 &&
          ((it - cfg.burnin) / cfg.thin) % cfg.record_sigma_every == 0)
        trace.sigma_samples.push_back(state.sigma.sigma);
    }
  }
  return trace;
}

Trace run_brg_chain(const EpidemicData& data, const BrgParams& brg,
                    const Priors& priors, const McmcConfig& cfg) {
  require_valid(data, cfg);
  const int m = data.m;
  const double n_pairs = m * (m - 1) / 2.0;
  Rng rng(cfg.seed);

  ChainState state;  // sigma/mu/gamma unused by this kernel
  state.g = Graph(m);
  for (int j = 1; j < m; ++j) state.g.set_edge(data.tree.infector[j], j, true);
  if (!data.known_edges.empty()) {
    for (int s = 0; s < m; ++s)
      for (int t = s + 1; t < m; ++t)
        if (data.known_edges.state(s, t) == 1) state.g.set_edge(s, t, true);
  }
  state.si_sum = si_edge_time_sum(state.g, data.times);
  state.n_earlier.assign(m, 0);
  for (int j = 1; j < m; ++j) {
    int n = 0;
    for (int i = 0; i < j; ++i) n += state.g.has_edge(i, j);
    state.n_earlier[j] = n;
  }
  state.log_tree = log_tree_given_graph(data.tree, state.g);
  double p = 0.5;

  std::vector<std::pair<int, int>> pairs;
  for (int s = 0; s < m; ++s)
    for (int t = s + 1; t < m; ++t) {
      if (data.tree.has_edge(s, t)) continue;
      if (data.known_edges.is_clamped(s, t)) continue;
      pairs.emplace_back(s, t);
    }

  Trace trace;
  trace.m = m;
  trace.edge_tally.assign(static_cast<std::size_t>(m) * (m - 1) / 2, 0);

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int it = 0; it < cfg.iterations; ++it) {
    gibbs_beta(state, data, priors, rng);
    p = sample_beta_dist(brg.a_p + state.g.edge_count(),
                         brg.b_p + n_pairs - state.g.edge_count(), rng);
    const double log_odds_p = std::log(p) - std::log1p(-p);

    for (const auto& [s, t] : pairs) {
      const bool cur = state.g.has_edge(s, t);
      const double gap = data.times[t] - data.times[s];
      const double si0 = state.si_sum - (cur ? gap : 0.0);
      const int n_t0 = state.n_earlier[t] - (cur ? 1 : 0);

      double logk0 = n_t0 == 0 ? kNegInf
                               : -std::log(static_cast<double>(n_t0)) +
                                     log_integrated_beta_kernel(m, si0, priors);
      const double logk1 = log_odds_p - std::log(static_cast<double>(n_t0 + 1)) +
                           log_integrated_beta_kernel(m, si0 + gap, priors);
      const bool value = unif(rng) < prob_branch_one(logk0, logk1);
      if (value != cur) {
        state.g.toggle_edge(s, t);
        state.si_sum = value ? si0 + gap : si0;
        const int n_old = state.n_earlier[t];
        state.n_earlier[t] = value ? n_t0 + 1 : n_t0;
        state.log_tree += std::log(static_cast<double>(n_old)) -
                          std::log(static_cast<double>(state.n_earlier[t]));
      }
    }

    if ((it + 1) % 1000 == 0) {
      state.si_sum = si_edge_time_sum(state.g, data.times);
      state.log_tree = log_tree_given_graph(data.tree, state.g);
    }

    if (it >= cfg.burnin && (it - cfg.burnin) % cfg.thin == 0) {
      trace.iter.push_back(it);
      trace.beta.push_back(state.params.beta);
      trace.p.push_back(p);
      const double edges = state.g.edge_count();
      const double lj =
          state.log_tree +
          log_times_given_graph(data.times, state.g, state.params.beta) +
          edges * std::log(p) + (n_pairs - edges) * std::log1p(-p) +
          (priors.a_beta - 1.0) * std::log(state.params.beta) -
          priors.b_beta * state.params.beta +
          (brg.a_p - 1.0) * std::log(p) + (brg.b_p - 1.0) * std::log1p(-p);
      trace.log_joint.push_back(lj);
      tally_edges(trace, state.g);
    }
  }
  return trace;
}

}  // namespace epinet
