#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>

#include "epinet/analysis.hpp"
#include "epinet/episim.hpp"
#include "epinet/io.hpp"
#include "epinet/mcmc.hpp"
#include "epinet/netgen.hpp"

namespace fs = std::filesystem;
using namespace epinet;

namespace {

struct FitOptions {
  std::string data_path;
  std::string known_edges_path;
  std::string config_path;
  std::string out_dir = ".";
  std::string model = "pa";
  std::string fix_gamma = "0";
  std::uint64_t seed = 1;
  int iterations = -1;
  int burnin = -1;
};

McmcConfig build_config(const FitOptions& opt) {
  McmcConfig cfg;
  if (!opt.config_path.empty()) apply_mcmc_config(cfg, parse_config_file(opt.config_path));
  if (opt.iterations > 0) cfg.iterations = opt.iterations;
  if (opt.burnin >= 0) cfg.burnin = opt.burnin;
  cfg.seed = opt.seed;
  cfg.model = opt.model == "brg" ? Model::brg : Model::pa;
  if (opt.fix_gamma == "none")
    cfg.fix_gamma.reset();
  else
    cfg.fix_gamma = std::stod(opt.fix_gamma);
  return cfg;
}

int cmd_simulate(int m, double beta, double mu, double gamma, std::uint64_t seed,
                 const std::string& out_dir) {
  fs::create_directories(out_dir);
  Rng rng(seed);
  auto [g_raw, record] = generate_pa_network(m, mu, gamma, NetworkOrder::identity(m), rng);
  SimulatedEpidemic epi = simulate_si(g_raw, beta, 0, rng);
  const Graph g_true = relabel_graph(g_raw, epi.order);

  EpidemicData data;
  data.m = m;
  data.times = epi.times;
  data.tree = epi.tree;
  write_epidemic_csv(out_dir + "/epidemic.csv", data);
  write_network_csv(out_dir + "/network.csv", g_true);
  std::cout << "wrote " << out_dir << "/epidemic.csv (m=" << m
            << ") and network.csv (|G|=" << g_true.edge_count() << ")\n";
  return 0;
}

int cmd_fit(const FitOptions& opt) {
  fs::create_directories(opt.out_dir);
  EpidemicData data = load_epidemic_csv(opt.data_path, opt.known_edges_path);
  McmcConfig cfg = build_config(opt);

  Trace trace;
  if (cfg.model == Model::brg)
    trace = run_brg_chain(data, BrgParams{}, Priors{}, cfg);
  else
    trace = run_chain(data, Priors{}, cfg);

  write_trace(opt.out_dir + "/trace.csv", trace);
  PosteriorSummary summary = summarize_trace(trace);
  write_summary(opt.out_dir + "/summary.csv", summary, data.m);
  write_edge_probs(opt.out_dir + "/edge_probs.csv", edge_posterior(trace), data.m);

  std::cout << "kept " << trace.kept_n() << " draws; beta mean "
            << summary.beta_mean;
  if (summary.has_p)
    std::cout << ", p mean " << summary.p_mean;
  else
    std::cout << ", mu mean " << summary.mu_mean << ", alpha mean "
              << summary.alpha_mean;
  std::cout << "\n";
  return 0;
}

int cmd_predict(const std::string& data_path, const std::string& trace_path,
                int n_sims, double gamma, std::uint64_t seed,
                const std::string& out_dir, int grid_points) {
  fs::create_directories(out_dir);
  EpidemicData data = load_epidemic_csv(data_path);
  Trace trace = load_trace_csv(trace_path);
  if (trace.mu.empty())
    throw std::runtime_error("predict requires a PA-model trace");

  const double span = data.times.back();
  std::vector<double> grid(grid_points);
  for (int k = 0; k < grid_points; ++k)
    grid[k] = span * k / static_cast<double>(grid_points - 1);
  PredictiveBands bands =
      posterior_predictive_curves(trace, data.m, grid, n_sims, gamma, seed);
  write_predictive_csv(out_dir + "/predictive.csv", bands,
                       cumulative_curve(data.times, grid));
  std::cout << "wrote " << out_dir << "/predictive.csv (" << n_sims
            << " simulations)\n";
  return 0;
}

int cmd_summary(const std::string& trace_path, int m, const std::string& out_path,
                const std::string& label) {
  Trace trace = load_trace_csv(trace_path);
  write_summary(out_path, summarize_trace(trace), m, label);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_study(const std::string& config_path, const std::string& out_dir,
              std::uint64_t seed) {
  StudyGrid grid = parse_study_config(config_path);
  std::vector<StudyCellResult> results = run_study(grid, out_dir, seed);
  int failed = 0;
  for (const auto& c : results) failed += c.failed;
  std::cout << "study finished: " << results.size() << " cells, " << failed
            << " failed; report at " << out_dir << "/study_report.csv\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SI epidemics on latent preferential-attachment networks"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "simulate a network epidemic");
  int sim_m = 50;
  double sim_beta = 0.4, sim_mu = 6.0, sim_gamma = 0.0;
  std::uint64_t sim_seed = 1;
  std::string sim_out = ".";
  sim->add_option("--m", sim_m, "population size")->check(CLI::Range(2, 1000000));
  sim->add_option("--beta", sim_beta, "infection rate per edge per day");
  sim->add_option("--mu", sim_mu, "new-edge count parameter");
  sim->add_option("--gamma", sim_gamma, "attachment mixing parameter");
  sim->add_option("--seed", sim_seed, "rng seed");
  sim->add_option("--out", sim_out, "output directory");

  // fit
  auto* fit = app.add_subcommand("fit", "run the MCMC sampler on a dataset");
  FitOptions fopt;
  fit->add_option("--data", fopt.data_path, "epidemic CSV")->required();
  fit->add_option("--known-edges", fopt.known_edges_path, "known-edges CSV");
  fit->add_option("--config", fopt.config_path, "key=value config file");
  fit->add_option("--seed", fopt.seed, "rng seed");
  fit->add_option("--out", fopt.out_dir, "output directory");
  fit->add_option("--model", fopt.model, "pa or brg")
      ->check(CLI::IsMember({"pa", "brg"}));
  fit->add_option("--fix-gamma", fopt.fix_gamma, "pinned gamma value, or 'none'");
  fit->add_option("--iterations", fopt.iterations, "chain length");
  fit->add_option("--burnin", fopt.burnin, "discarded iterations");

  // predict
  auto* pred = app.add_subcommand("predict", "posterior predictive curves");
  std::string pred_data, pred_trace, pred_out = ".";
  int pred_sims = 400, pred_grid = 200;
  double pred_gamma = 0.0;
  std::uint64_t pred_seed = 1;
  pred->add_option("--data", pred_data, "epidemic CSV")->required();
  pred->add_option("--trace", pred_trace, "trace CSV from fit")->required();
  pred->add_option("--n-sims", pred_sims, "number of predictive simulations");
  pred->add_option("--grid-points", pred_grid, "time grid size");
  pred->add_option("--gamma", pred_gamma, "gamma used for simulation");
  pred->add_option("--seed", pred_seed, "rng seed");
  pred->add_option("--out", pred_out, "output directory");

  // summary
  auto* summ = app.add_subcommand("summary", "summarize an existing trace");
  std::string summ_trace, summ_out = "summary.csv", summ_label = "1";
  int summ_m = 0;
  summ->add_option("--trace", summ_trace, "trace CSV")->required();
  summ->add_option("--m", summ_m, "population size")->required();
  summ->add_option("--out", summ_out, "output file");
  summ->add_option("--label", summ_label, "epidemic label column");

  // study
  auto* study = app.add_subcommand("study", "simulation study over a grid");
  std::string study_config, study_out = "study";
  std::uint64_t study_seed = 1;
  study->add_option("--config", study_config, "study config file")->required();
  study->add_option("--out", study_out, "output directory");
  study->add_option("--seed", study_seed, "base seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed())
      return cmd_simulate(sim_m, sim_beta, sim_mu, sim_gamma, sim_seed, sim_out);
    if (fit->parsed()) return cmd_fit(fopt);
    if (pred->parsed())
      return cmd_predict(pred_data, pred_trace, pred_sims, pred_gamma, pred_seed,
                         pred_out, pred_grid);
    if (summ->parsed()) return cmd_summary(summ_trace, summ_m, summ_out, summ_label);
    if (study->parsed()) return cmd_study(study_config, study_out, study_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
