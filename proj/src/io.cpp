#include "epinet/io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "epinet/episim.hpp"
#include "epinet/netgen.hpp"

namespace epinet {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s, const std::string& context) {
  std::size_t pos = 0;
  double value = 0;
  try {
    value = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error(context + ": bad number '" + s + "'");
  }
  if (pos != s.size()) throw std::runtime_error(context + ": bad number '" + s + "'");
  return value;
}

long parse_long(const std::string& s, const std::string& context) {
  std::size_t pos = 0;
  long value = 0;
  try {
    value = std::stol(s, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error(context + ": bad integer '" + s + "'");
  }
  if (pos != s.size()) throw std::runtime_error(context + ": bad integer '" + s + "'");
  return value;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return in;
}

// shortest round-trip double formatting
std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  double back = std::strtod(buf, nullptr);
  if (back == v) {
    for (int prec = 1; prec <= 16; ++prec) {
      char short_buf[40];
      std::snprintf(short_buf, sizeof short_buf, "%.*g", prec, v);
      if (std::strtod(short_buf, nullptr) == v) return short_buf;
    }
  }
  return buf;
}

// Table-style "mean (sd)" cell: three significant digits, trailing zeros trimmed
std::string fmt_sig3(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

EpidemicData load_epidemic_csv(const std::string& path,
                               const std::string& known_edges_path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ": empty file");
  if (trim(line) != "node_id,infection_time,infector_id")
    throw std::runtime_error(path + ":1: expected header node_id,infection_time,infector_id");

  std::vector<RawRecord> raw;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 3) {
      std::ostringstream os;
      os << path << ":" << line_no << ": expected 3 fields, got " << fields.size();
      throw std::runtime_error(os.str());
    }
    RawRecord r;
    r.id = trim(fields[0]);
    std::ostringstream ctx;
    ctx << path << ":" << line_no;
    r.time = parse_double(trim(fields[1]), ctx.str());
    r.infector = trim(fields[2]);
    if (r.id.empty()) throw std::runtime_error(ctx.str() + ": empty node_id");
    raw.push_back(std::move(r));
  }

  EpidemicData data = normalize_and_relabel(raw);
  if (!known_edges_path.empty())
    data.known_edges = load_known_edges_csv(known_edges_path, data.m);

  ValidationReport report = validate_dataset(data);
  if (!report.ok()) {
    std::ostringstream os;
    os << path << ": validation failed:";
    for (const auto& v : report.violations) os << "\n  - " << v;
    throw std::runtime_error(os.str());
  }
  return data;
}

void write_epidemic_csv(const std::string& path, const EpidemicData& data) {
  std::ofstream out = open_out(path);
  out << "node_id,infection_time,infector_id\n";
  for (int j = 0; j < data.m; ++j) {
    out << (j + 1) << "," << fmt_double(data.times[j]) << ",";
    if (data.tree.infector[j] >= 0) out << (data.tree.infector[j] + 1);
    out << "\n";
  }
}

void write_network_csv(const std::string& path, const Graph& g) {
  std::ofstream out = open_out(path);
  out << "i,j,present\n";
  for (int i = 0; i < g.m(); ++i)
    for (int j = i + 1; j < g.m(); ++j)
      out << (i + 1) << "," << (j + 1) << "," << (g.has_edge(i, j) ? 1 : 0) << "\n";
}

KnownEdges load_known_edges_csv(const std::string& path, int m) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "i,j,present")
    throw std::runtime_error(path + ":1: expected header i,j,present");
  KnownEdges known(m);
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_csv_line(line);
    std::ostringstream ctx;
    ctx << path << ":" << line_no;
    if (fields.size() != 3)
      throw std::runtime_error(ctx.str() + ": expected 3 fields");
    const long i = parse_long(trim(fields[0]), ctx.str());
    const long j = parse_long(trim(fields[1]), ctx.str());
    const long present = parse_long(trim(fields[2]), ctx.str());
    if (i < 1 || i > m || j < 1 || j > m || i == j)
      throw std::runtime_error(ctx.str() + ": bad node pair");
    if (present != 0 && present != 1)
      throw std::runtime_error(ctx.str() + ": present must be 0 or 1");
    known.clamp(static_cast<int>(i - 1), static_cast<int>(j - 1), present == 1);
  }
  return known;
}

void write_trace(const std::string& path, const Trace& trace) {
  if (trace.kept_n() == 0)
    throw std::runtime_error("write_trace: empty kept trace");
  std::ofstream out = open_out(path);
  const bool brg = !trace.p.empty();
  out << (brg ? "iter,beta,p,log_joint\n" : "iter,beta,mu,gamma,alpha,log_joint\n");
  for (int k = 0; k < trace.kept_n(); ++k) {
    out << trace.iter[k] << "," << fmt_double(trace.beta[k]) << ",";
    if (brg) {
      out << fmt_double(trace.p[k]);
    } else {
      const double alpha = trace.beta[k] * mu_star(trace.mu[k]);
      out << fmt_double(trace.mu[k]) << "," << fmt_double(trace.gamma[k]) << ","
          << fmt_double(alpha);
    }
    out << "," << fmt_double(trace.log_joint[k]) << "\n";
  }
}

Trace load_trace_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  const std::string header = trim(line);
  const bool brg = header == "iter,beta,p,log_joint";
  if (!brg && header != "iter,beta,mu,gamma,alpha,log_joint")
    throw std::runtime_error(path + ":1: unrecognized trace header");
  Trace trace;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_csv_line(line);
    std::ostringstream ctx;
    ctx << path << ":" << line_no;
    const std::size_t expected = brg ? 4 : 6;
    if (fields.size() != expected)
      throw std::runtime_error(ctx.str() + ": wrong field count");
    trace.iter.push_back(static_cast<int>(parse_long(trim(fields[0]), ctx.str())));
    trace.beta.push_back(parse_double(trim(fields[1]), ctx.str()));
    if (brg) {
      trace.p.push_back(parse_double(trim(fields[2]), ctx.str()));
      trace.log_joint.push_back(parse_double(trim(fields[3]), ctx.str()));
    } else {
      trace.mu.push_back(parse_double(trim(fields[2]), ctx.str()));
      trace.gamma.push_back(parse_double(trim(fields[3]), ctx.str()));
      trace.log_joint.push_back(parse_double(trim(fields[5]), ctx.str()));
    }
  }
  if (trace.kept_n() == 0) throw std::runtime_error(path + ": no kept draws");
  return trace;
}

void write_summary(const std::string& path, const PosteriorSummary& summary,
                   int m, const std::string& label) {
  std::ofstream out = open_out(path);
  if (summary.has_p) {
    out << "epidemic,m,beta,p,correlation\n";
    out << label << "," << m << "," << fmt_sig3(summary.beta_mean) << " ("
        << fmt_sig3(summary.beta_sd) << ")," << fmt_sig3(summary.p_mean) << " ("
        << fmt_sig3(summary.p_sd) << ")," << fmt_sig3(summary.corr_beta_p) << "\n";
    return;
  }
  out << "epidemic,m,beta,mu,correlation,alpha\n";
  out << label << "," << m << "," << fmt_sig3(summary.beta_mean) << " ("
      << fmt_sig3(summary.beta_sd) << ")," << fmt_sig3(summary.mu_mean) << " ("
      << fmt_sig3(summary.mu_sd) << ")," << fmt_sig3(summary.corr_beta_mustar)
      << "," << fmt_sig3(summary.alpha_mean) << " (" << fmt_sig3(summary.alpha_sd)
      << ")\n";
}

void write_edge_probs(const std::string& path, const std::vector<double>& probs,
                      int m) {
  if (probs.size() != static_cast<std::size_t>(m) * (m - 1) / 2)
    throw std::invalid_argument("write_edge_probs: size mismatch");
  std::ofstream out = open_out(path);
  out << "i,j,prob\n";
  std::size_t k = 0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      out << (i + 1) << "," << (j + 1) << "," << fmt_double(probs[k++]) << "\n";
}

void write_predictive_csv(const std::string& path, const PredictiveBands& bands,
                          const std::vector<int>& observed) {
  std::ofstream out = open_out(path);
  out << "t,q025,q50,q975,observed\n";
  for (std::size_t k = 0; k < bands.grid.size(); ++k) {
    out << fmt_double(bands.grid[k]) << "," << fmt_double(bands.lo[k]) << ","
        << fmt_double(bands.med[k]) << "," << fmt_double(bands.hi[k]) << ","
        << observed[k] << "\n";
  }
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in = open_in(path);
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << path << ":" << line_no << ": expected key=value";
      throw std::runtime_error(os.str());
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (!kv.emplace(key, value).second)
      throw std::runtime_error(path + ": duplicate key '" + key + "'");
  }
  return kv;
}

namespace {

std::vector<double> parse_double_list(const std::string& s, const std::string& ctx) {
  std::vector<double> out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, ' '))
    if (!trim(item).empty()) out.push_back(parse_double(trim(item), ctx));
  if (out.empty()) throw std::runtime_error(ctx + ": empty list");
  return out;
}

bool consume_mcmc_key(McmcConfig& cfg, const std::string& key,
                      const std::string& value) {
  if (key == "iterations") {
    cfg.iterations = static_cast<int>(parse_long(value, key));
  } else if (key == "burnin") {
    cfg.burnin = static_cast<int>(parse_long(value, key));
  } else if (key == "fix_gamma") {
    if (value == "none")
      cfg.fix_gamma.reset();
    else
      cfg.fix_gamma = parse_double(value, key);
  } else if (key == "target_accept") {
    cfg.target_accept = parse_double(value, key);
  } else if (key == "init_mu") {
    cfg.init_mu = parse_double(value, key);
  } else if (key == "init_gamma") {
    cfg.init_gamma = parse_double(value, key);
  } else if (key == "proposal_sd_mu") {
    cfg.proposal_sd_mu = parse_double(value, key);
  } else if (key == "proposal_sd_gamma") {
    cfg.proposal_sd_gamma = parse_double(value, key);
  } else if (key == "sigma_moves_per_iter") {
    cfg.sigma_moves_per_iter = static_cast<int>(parse_long(value, key));
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(parse_long(value, key));
  } else if (key == "model") {
    if (value == "pa")
      cfg.model = Model::pa;
    else if (value == "brg")
      cfg.model = Model::brg;
    else
      throw std::runtime_error("model must be pa or brg");
  } else if (key == "thin") {
    cfg.thin = static_cast<int>(parse_long(value, key));
  } else if (key == "random_scan") {
    cfg.random_scan = value == "1" || value == "true";
  } else if (key == "adapt_batch") {
    cfg.adapt_batch = static_cast<int>(parse_long(value, key));
  } else if (key == "record_sigma_every") {
    cfg.record_sigma_every = static_cast<int>(parse_long(value, key));
  } else {
    return false;
  }
  return true;
}

}  // namespace

void apply_mcmc_config(McmcConfig& cfg,
                       const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv)
    if (!consume_mcmc_key(cfg, key, value))
      throw std::runtime_error("unknown config key '" + key + "'");
}

StudyGrid parse_study_config(const std::string& path) {
  StudyGrid grid;
  for (const auto& [key, value] : parse_config_file(path)) {
    if (key == "m_values") {
      grid.m_values.clear();
      for (double v : parse_double_list(value, key))
        grid.m_values.push_back(static_cast<int>(v));
    } else if (key == "beta_values") {
      grid.beta_values = parse_double_list(value, key);
    } else if (key == "mu_values") {
      grid.mu_values = parse_double_list(value, key);
    } else if (key == "gamma_values") {
      grid.gamma_values = parse_double_list(value, key);
    } else if (key == "known_proportions") {
      grid.known_proportions = parse_double_list(value, key);
      for (double q : grid.known_proportions)
        if (q < 0.0 || q > 1.0)
          throw std::runtime_error("known_proportions must lie in [0,1]");
    } else if (key == "replicates") {
      grid.replicates = static_cast<int>(parse_long(value, key));
    } else if (consume_mcmc_key(grid.chain, key, value)) {
      // chain option
    } else {
      throw std::runtime_error("unknown config key '" + key + "'");
    }
  }
  return grid;
}

int max_threads() {
  if (const char* env = std::getenv("EPINET_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

StudyCellResult run_study_cell(const StudyGrid& grid, int m, double beta,
                               double mu, double gamma, double proportion,
                               int replicate, std::uint64_t seed) {
  StudyCellResult cell;
  cell.m = m;
  cell.beta_true = beta;
  cell.mu_true = mu;
  cell.gamma_true = gamma;
  cell.proportion = proportion;
  cell.replicate = replicate;
  cell.seed = seed;
  cell.clamp_seed = split_seed(seed, 0xC1A3);
  try {
    Rng rng(seed);
    auto [g_raw, record] =
        generate_pa_network(m, mu, gamma, NetworkOrder::identity(m), rng);
    SimulatedEpidemic epi = simulate_si(g_raw, beta, 0, rng);
    const Graph g_true = relabel_graph(g_raw, epi.order);

    EpidemicData data;
    data.m = m;
    data.times = epi.times;
    data.tree = epi.tree;

    if (proportion > 0.0) {
      std::vector<std::pair<int, int>> free_pairs;
      for (int s = 0; s < m; ++s)
        for (int t = s + 1; t < m; ++t)
          if (!data.tree.has_edge(s, t)) free_pairs.emplace_back(s, t);
      Rng clamp_rng(cell.clamp_seed);
      std::shuffle(free_pairs.begin(), free_pairs.end(), clamp_rng);
      const std::size_t n_clamp = static_cast<std::size_t>(
          std::llround(proportion * static_cast<double>(free_pairs.size())));
      data.known_edges = KnownEdges(m);
      for (std::size_t k = 0; k < n_clamp; ++k) {
        const auto& [s, t] = free_pairs[k];
        data.known_edges.clamp(s, t, g_true.has_edge(s, t));
      }
    }

    McmcConfig cfg = grid.chain;
    cfg.seed = split_seed(seed, 0xF17);
    Trace trace = run_chain(data, Priors{}, cfg);
    cell.summary = summarize_trace(trace);

    std::vector<double> alpha(trace.beta.size());
    for (std::size_t k = 0; k < alpha.size(); ++k)
      alpha[k] = trace.beta[k] * mu_star(trace.mu[k]);
    cell.beta_lo = quantile(trace.beta, 0.025);
    cell.beta_hi = quantile(trace.beta, 0.975);
    cell.mu_lo = quantile(trace.mu, 0.025);
    cell.mu_hi = quantile(trace.mu, 0.975);
    cell.gamma_lo = quantile(trace.gamma, 0.025);
    cell.gamma_hi = quantile(trace.gamma, 0.975);
    cell.alpha_lo = quantile(alpha, 0.025);
    cell.alpha_hi = quantile(alpha, 0.975);
  } catch (const std::exception& e) {
    cell.failed = true;
    cell.error = e.what();
  }
  return cell;
}

std::vector<StudyCellResult> run_study(const StudyGrid& grid,
                                       const std::string& out_dir,
                                       std::uint64_t base_seed) {
  struct CellSpec {
    int m;
    double beta, mu, gamma, proportion;
    int replicate;
    std::uint64_t seed;
  };
  std::vector<CellSpec> specs;
  std::uint64_t index = 0;
  for (int m : grid.m_values)
    for (double beta : grid.beta_values)
      for (double mu : grid.mu_values)
        for (double gamma : grid.gamma_values)
          for (double q : grid.known_proportions)
            for (int rep = 0; rep < grid.replicates; ++rep)
              specs.push_back({m, beta, mu, gamma, q, rep,
                               split_seed(base_seed, index++)});

  std::vector<StudyCellResult> results(specs.size());
  const int n_threads =
      std::max(1, std::min(max_threads(), static_cast<int>(specs.size())));
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  for (int w = 0; w < n_threads; ++w) {
    pool.emplace_back([&]() {
      for (std::size_t k = next.fetch_add(1); k < specs.size();
           k = next.fetch_add(1)) {
        const CellSpec& s = specs[k];
        results[k] = run_study_cell(grid, s.m, s.beta, s.mu, s.gamma,
                                    s.proportion, s.replicate, s.seed);
      }
    });
  }
  for (auto& th : pool) th.join();

  std::filesystem::create_directories(out_dir);
  std::ofstream out = open_out(out_dir + "/study_report.csv");
  out << "m,beta_true,mu_true,gamma_true,proportion,replicate,seed,clamp_seed,"
         "status,beta_mean,beta_lo,beta_hi,mu_mean,mu_lo,mu_hi,gamma_mean,"
         "gamma_lo,gamma_hi,alpha_mean,alpha_lo,alpha_hi,corr_beta_mustar\n";
  for (const auto& c : results) {
    out << c.m << "," << fmt_double(c.beta_true) << "," << fmt_double(c.mu_true)
        << "," << fmt_double(c.gamma_true) << "," << fmt_double(c.proportion)
        << "," << c.replicate << "," << c.seed << "," << c.clamp_seed << ",";
    if (c.failed) {
      std::string msg = c.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      out << "failed: " << msg << ",,,,,,,,,,,,\n";
      continue;
    }
    out << "ok," << fmt_double(c.summary.beta_mean) << "," << fmt_double(c.beta_lo)
        << "," << fmt_double(c.beta_hi) << "," << fmt_double(c.summary.mu_mean)
        << "," << fmt_double(c.mu_lo) << "," << fmt_double(c.mu_hi) << ","
        << fmt_double(c.summary.gamma_mean) << "," << fmt_double(c.gamma_lo) << ","
        << fmt_double(c.gamma_hi) << "," << fmt_double(c.summary.alpha_mean) << ","
        << fmt_double(c.alpha_lo) << "," << fmt_double(c.alpha_hi) << ","
        << fmt_double(c.summary.corr_beta_mustar) << "\n";
  }
  return results;
}

}  // namespace epinet
