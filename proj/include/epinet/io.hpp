#ifndef EPINET_IO_HPP
#define EPINET_IO_HPP

#include <map>
#include <string>
#include <vector>

#include "epinet/analysis.hpp"
#include "epinet/mcmc.hpp"
#include "epinet/types.hpp"

namespace epinet {

// epidemic CSV: header node_id,infection_time,infector_id (root's infector
// empty); optional known-edges CSV: header i,j,present with 1-based
// post-relabeling labels.
EpidemicData load_epidemic_csv(const std::string& path,
                               const std::string& known_edges_path = "");

void write_epidemic_csv(const std::string& path, const EpidemicData& data);

// full C(m,2) listing `i,j,present` of a graph (serves as known-edges input)
void write_network_csv(const std::string& path, const Graph& g);
KnownEdges load_known_edges_csv(const std::string& path, int m);

void write_trace(const std::string& path, const Trace& trace);
Trace load_trace_csv(const std::string& path);

// one summary row in Table-1 style: mean (sd) cells, 3 significant digits
void write_summary(const std::string& path, const PosteriorSummary& summary,
                   int m, const std::string& label = "1");

void write_edge_probs(const std::string& path, const std::vector<double>& probs,
                      int m);

void write_predictive_csv(const std::string& path, const PredictiveBands& bands,
                          const std::vector<int>& observed);

// flat key=value config; unknown keys are errors
std::map<std::string, std::string> parse_config_file(const std::string& path);
void apply_mcmc_config(McmcConfig& cfg,
                       const std::map<std::string, std::string>& kv);

struct StudyGrid {
  std::vector<int> m_values{70};
  std::vector<double> beta_values{0.4};
  std::vector<double> mu_values{4, 6, 8, 10};
  std::vector<double> gamma_values{0.0};
  std::vector<double> known_proportions{0.0};
  int replicates = 1;
  McmcConfig chain;
};

StudyGrid parse_study_config(const std::string& path);

struct StudyCellResult {
  int m = 0;
  double beta_true = 0, mu_true = 0, gamma_true = 0;
  double proportion = 0;
  int replicate = 0;
  std::uint64_t seed = 0, clamp_seed = 0;
  bool failed = false;
  std::string error;
  PosteriorSummary summary;
  double beta_lo = 0, beta_hi = 0;
  double mu_lo = 0, mu_hi = 0;
  double gamma_lo = 0, gamma_hi = 0;
  double alpha_lo = 0, alpha_hi = 0;
};

// Simulates (network, epidemic) per cell, clamps the stated proportion of
// non-tree pairs to their simulated truth, runs the chain, and writes
// per-cell outputs plus a study_report.csv. Cells run concurrently, capped
// by EPINET_THREADS.
std::vector<StudyCellResult> run_study(const StudyGrid& grid,
                                       const std::string& out_dir,
                                       std::uint64_t base_seed);

// simulate one study cell (exposed for tests)
StudyCellResult run_study_cell(const StudyGrid& grid, int m, double beta,
                               double mu, double gamma, double proportion,
                               int replicate, std::uint64_t seed);

int max_threads();  // EPINET_THREADS override, else hardware concurrency

}  // namespace epinet

#endif
