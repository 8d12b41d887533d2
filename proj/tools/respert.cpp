// respert: resistance-distance toolkit for growing two-community graphs.
//
// Subcommands:
//   simulate      sample a random graph and write it as an edge list
//   distance      distance between two edge-list files
//   experiment    run a configured experiment (timeseries|separation|power)
//   oracle-check  cross-validate the resistance routes and the edge update
//
// Exit codes: 0 success, 1 invalid input or configuration, 2 internal check
// failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "respert/format.hpp"
#include "respert/graph.hpp"
#include "respert/harness.hpp"
#include "respert/models.hpp"
#include "respert/resistance.hpp"

namespace {

respert::Graph load_graph(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw respert::IoError("cannot open " + path);
  return respert::read_edge_list(is);
}

int run_simulate(const std::string& model, int n, double p, double q, bool q_given,
                 std::uint64_t seed, const std::string& out) {
  respert::Graph g;
  if (model == "er") {
    if (q_given) throw respert::InvalidParameter("--q only applies to the sbm model");
    g = respert::sample_er(n, p, seed);
  } else if (model == "sbm") {
    g = respert::sample_sbm(n, p, q, seed);
  } else {
    throw respert::InvalidParameter("unknown model '" + model + "' (expected er or sbm)");
  }
  std::ofstream os(out, std::ios::binary);
  if (!os) throw respert::IoError("cannot open " + out + " for writing");
  respert::write_edge_list(g, os);
  std::cout << "wrote " << out << " (n=" << g.vertex_count() << ", m=" << g.edge_count()
            << ")\n";
  return 0;
}

int run_distance(const std::string& a, const std::string& b, double beta, double p_norm,
                 bool p_norm_given) {
  const respert::Graph ga = load_graph(a);
  const respert::Graph gb = load_graph(b);
  double value = 0.0;
  if (p_norm_given) {
    value = respert::rp_distance(ga, gb, p_norm);
  } else {
    value = respert::rd_distance(ga, gb, respert::DistanceParams{beta});
  }
  std::cout << respert::fmt_double(value) << '\n';
  return 0;
}

int run_experiment_cmd(const std::string& kind, const std::string& config_path,
                       const std::string& out_dir, bool out_dir_given, std::uint64_t seed,
                       bool seed_given, unsigned threads, bool threads_given) {
  std::ifstream is(config_path);
  if (!is) throw respert::IoError("cannot open config " + config_path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw respert::InvalidParameter(std::string("config is not valid json: ") + e.what());
  }
  respert::ExperimentConfig cfg = respert::config_from_json(j);
  const respert::ExperimentKind requested = respert::kind_from_string(kind);
  if (j.contains("kind") && cfg.kind != requested) {
    throw respert::ConfigMismatch("config kind '" + respert::kind_to_string(cfg.kind) +
                                  "' does not match subcommand '" + kind + "'");
  }
  cfg.kind = requested;
  if (out_dir_given) cfg.out_dir = out_dir;
  if (seed_given) cfg.master_seed = seed;
  if (threads_given) cfg.threads = threads;
  respert::run_experiment(cfg);
  std::cout << "experiment '" << kind << "' written to " << cfg.out_dir << '\n';
  return 0;
}

int run_oracle_check_cmd(int n_max, int trials, std::uint64_t seed, bool inject_fault) {
  const respert::OracleCheckReport report =
      respert::run_oracle_check(n_max, trials, seed, inject_fault);
  std::cout << "checks=" << report.checks << " failures=" << report.failures
            << " max_error=" << respert::fmt_double(report.max_error)
            << " same_component_updates=" << report.same_component_updates
            << " bridge_updates=" << report.bridge_updates << '\n';
  for (const std::string& msg : report.messages) std::cout << "  " << msg << '\n';
  return report.passed() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"resistance-distance toolkit for growing two-community graphs"};
  app.require_subcommand(1);

  // simulate
  std::string model, out_file;
  int sim_n = 0;
  double sim_p = 0.0, sim_q = 0.0;
  std::uint64_t sim_seed = 1;
  CLI::App* simulate = app.add_subcommand("simulate", "sample a random graph");
  simulate->add_option("--model", model, "er or sbm")->required();
  simulate->add_option("--n", sim_n, "vertex count")->required();
  simulate->add_option("--p", sim_p, "edge probability (in-community for sbm)")->required();
  CLI::Option* q_opt = simulate->add_option("--q", sim_q, "cross-community probability (sbm)");
  simulate->add_option("--seed", sim_seed, "random seed")->required();
  simulate->add_option("--out", out_file, "output edge-list file")->required();

  // distance
  std::string file_a, file_b;
  double beta = 1.0, p_norm = 1.0;
  CLI::App* distance = app.add_subcommand("distance", "distance between two edge lists");
  distance->add_option("--a", file_a, "first edge-list file")->required();
  distance->add_option("--b", file_b, "second edge-list file")->required();
  distance->add_option("--beta", beta, "renormalization constant (default 1)");
  CLI::Option* p_opt = distance->add_option(
      "--p-norm", p_norm, "use the raw resistance p-norm instead of the renormalized distance");

  // experiment
  std::string exp_kind, config_path, exp_out_dir;
  std::uint64_t exp_seed = 0;
  unsigned exp_threads = 0;
  CLI::App* experiment = app.add_subcommand("experiment", "run a configured experiment");
  experiment->add_option("kind", exp_kind, "timeseries|separation|power")
      ->required()
      ->check(CLI::IsMember({"timeseries", "separation", "power"}));
  experiment->add_option("--config", config_path, "json config file")->required();
  CLI::Option* out_dir_opt = experiment->add_option("--out-dir", exp_out_dir, "output directory");
  CLI::Option* seed_opt = experiment->add_option("--seed", exp_seed, "master seed override");
  CLI::Option* threads_opt = experiment->add_option("--threads", exp_threads, "worker threads");

  // oracle-check
  int n_max = 12, trials = 200;
  std::uint64_t check_seed = 1;
  bool inject_fault = false;
  CLI::App* oracle = app.add_subcommand("oracle-check", "cross-validate resistance routes");
  oracle->add_option("--n-max", n_max, "largest graph size (default 12)");
  oracle->add_option("--trials", trials, "trials per suite (default 200)");
  oracle->add_option("--seed", check_seed, "random seed");
  oracle->add_flag("--inject-fault", inject_fault, "corrupt one comparison (harness test hook)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      return run_simulate(model, sim_n, sim_p, sim_q, q_opt->count() > 0, sim_seed, out_file);
    }
    if (distance->parsed()) {
      return run_distance(file_a, file_b, beta, p_norm, p_opt->count() > 0);
    }
    if (experiment->parsed()) {
      return run_experiment_cmd(exp_kind, config_path, exp_out_dir, out_dir_opt->count() > 0,
                                exp_seed, seed_opt->count() > 0, exp_threads,
                                threads_opt->count() > 0);
    }
    if (oracle->parsed()) {
      return run_oracle_check_cmd(n_max, trials, check_seed, inject_fault);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
