// Command-line front end for the adaptive MPC simulator.
//
// Subcommands:
//   simulate  — one closed-loop run (adaptive by default)
//   compare   — adaptive vs. full-knowledge runs of the same scenario
//   identify  — replay the parameter estimator over a recorded trajectory
//   cftoc     — solve a single open-loop finite-horizon problem
//
// Exit codes: 0 success, 2 config error, 3 solver failure, 4 I/O error.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ampc/ampc.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  long seed = 0;  // reserved; the pipeline is deterministic
  bool quiet = false;
  bool verbose = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_config) {
  if (with_config)
    cmd->add_option("--config", args.config_path,
                    "Scenario config file (omit for the built-in default "
                    "scenario)");
  cmd->add_option("--out", args.out_dir, "Output directory")->required();
  cmd->add_option("--seed", args.seed,
                  "Reserved for future stochastic features; accepted and "
                  "ignored (runs are deterministic)");
  cmd->add_flag("--quiet", args.quiet, "Suppress normal output");
  cmd->add_flag("--verbose", args.verbose, "List every artifact written");
}

ampc::SimConfig config_for(const CommonArgs& args) {
  if (args.config_path.empty()) {
    ampc::SimConfig cfg;  // built-in default scenario
    ampc::validate_config(cfg);
    return cfg;
  }
  return ampc::load_config(args.config_path);
}

void print_files(const CommonArgs& args,
                 const std::vector<std::string>& files) {
  if (!args.verbose || args.quiet) return;
  for (const auto& f : files) std::cout << "wrote " << f << "\n";
}

int run_simulate_cmd(const CommonArgs& args) {
  const ampc::SimConfig cfg = config_for(args);
  const ampc::RunArtifacts art = ampc::run_simulate(cfg, args.out_dir);
  if (!args.quiet) {
    std::cout << "simulate: " << art.summary.steps << " steps in "
              << art.summary.wall_time_seconds << " s\n"
              << "  final position error: "
              << art.summary.final_position_error << " m\n"
              << "  final heading error:  " << art.summary.final_heading_error
              << " rad\n"
              << "  realized cost:        " << art.summary.total_cost << "\n";
  }
  std::vector<std::string> files{art.config_snapshot, art.trajectory_csv,
                                 art.estimator_csv, art.summary_file};
  files.insert(files.end(), art.figures.begin(), art.figures.end());
  print_files(args, files);
  return 0;
}

int run_compare_cmd(const CommonArgs& args) {
  const ampc::SimConfig cfg = config_for(args);
  const ampc::CompareArtifacts art = ampc::run_compare(cfg, args.out_dir);
  if (!args.quiet) {
    std::cout << "compare: adaptive vs. full knowledge over "
              << art.adaptive.summary.steps << " steps\n"
              << "  adaptive final position error:       "
              << art.adaptive.summary.final_position_error << " m\n"
              << "  full-knowledge final position error: "
              << art.full_knowledge.summary.final_position_error << " m\n"
              << "  max input deviation: "
              << std::max(art.max_thrust_deviation, art.max_moment_deviation)
              << "\n";
  }
  print_files(args, {art.overlay_figure, art.summary_file});
  return 0;
}

int run_identify_cmd(const CommonArgs& args, const std::string& trace) {
  ampc::EstimatorInit init;  // defaults; a config may override them
  if (!args.config_path.empty())
    init = ampc::load_config(args.config_path).estimator;
  const ampc::IdentifyArtifacts art =
      ampc::run_identify(trace, init, args.out_dir);
  if (!args.quiet) {
    const ampc::ProxyParams th = ampc::current_proxy(art.final_state);
    std::cout << "identify: replayed " << art.transitions << " transitions\n"
              << "  alpha_v " << th.alpha_v << "  beta_v " << th.beta_v
              << "  alpha_w " << th.alpha_w << "  beta_w " << th.beta_w
              << "\n";
  }
  print_files(args, {art.estimator_csv, art.summary_file});
  return 0;
}

int run_cftoc_cmd(const CommonArgs& args) {
  const ampc::SimConfig cfg = config_for(args);
  const ampc::CftocArtifacts art = ampc::run_cftoc(cfg, args.out_dir);
  if (!args.quiet) {
    std::cout << "cftoc: horizon " << cfg.horizon << ", cost "
              << art.solution.cost << ", " << art.solution.iterations
              << " iterations, "
              << (art.solution.converged ? "converged" : "hit iteration cap")
              << "\n";
  }
  print_files(args, {art.prediction_csv, art.figure, art.summary_file});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive model-predictive control of a two-wheeled robot"};
  app.require_subcommand(1);

  CommonArgs sim_args, cmp_args, idf_args,ocp_args;
  std::string trace_path;

  CLI::App* sim = app.add_subcommand("simulate", "Run one closed-loop simulation");
  add_common(sim, sim_args, true);

  CLI::App* cmp = app.add_subcommand(
      "compare", "Run adaptive and full-knowledge variants side by side");
  add_common(cmp, cmp_args, true);

  CLI::App* idf = app.add_subcommand(
      "identify", "Replay the parameter estimator over a recorded trajectory");
  idf->add_option("--trace", trace_path, "Trajectory CSV to replay")
      ->required();
  idf->add_option("--config", idf_args.config_path,
                  "Config supplying the initial estimates (optional)");
  idf->add_option("--out", idf_args.out_dir, "Output directory")->required();
  idf->add_option("--seed", idf_args.seed,
                  "Reserved for future stochastic features; accepted and "
                  "ignored (runs are deterministic)");
  idf->add_flag("--quiet", idf_args.quiet, "Suppress normal output");
  idf->add_flag("--verbose", idf_args.verbose, "List every artifact written");

  CLI::App* ocp = app.add_subcommand(
      "cftoc", "Solve one open-loop finite-horizon problem");
  add_common(ocp, ocp_args, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return run_simulate_cmd(sim_args);
    if (cmp->parsed()) return run_compare_cmd(cmp_args);
    if (idf->parsed()) return run_identify_cmd(idf_args, trace_path);
    if (ocp->parsed()) return run_cftoc_cmd(ocp_args);
  } catch (const ampc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ampc::ClosedLoopError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const ampc::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const ampc::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const ampc::DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
