// fffopt: roughness analysis and constrained print-parameter optimization.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fffopt/commands.hpp"
#include "fffopt/error.hpp"

namespace cli = fffopt::cli;

int main(int argc, char** argv) {
  CLI::App app{"Print-parameter optimization from in-situ surface roughness scans"};
  app.require_subcommand(1);

  // scan ------------------------------------------------------------------
  auto* scan = app.add_subcommand("scan", "Roughness of laser scan CSV files");
  scan->require_subcommand(1);

  std::string ra_input;
  auto* scan_ra = scan->add_subcommand("ra", "Per-layer Ra and global roughness of one part scan");
  scan_ra->add_option("input", ra_input, "Scan CSV (layer_index,position_mm,height_um)")->required();

  std::vector<std::string> stats_inputs;
  auto* scan_stats = scan->add_subcommand("stats", "Repeatability statistics over repeated scans");
  scan_stats->add_option("inputs", stats_inputs, "Two or more scan CSV files")->required();

  // optimize --------------------------------------------------------------
  auto* optimize = app.add_subcommand("optimize", "Constrained Bayesian optimization of print parameters");
  optimize->require_subcommand(1);

  cli::RunOptions run;
  std::string run_out, run_config, run_init;
  auto* opt_run = optimize->add_subcommand("run", "Closed loop against the virtual printer");
  opt_run->add_option("--seed", run.seed, "Seed for every random stream")->capture_default_str();
  opt_run->add_option("--iters-phase1", run.iters_phase1)->capture_default_str();
  opt_run->add_option("--pi1", run.pi1, "Confidence threshold of phase 1")->capture_default_str();
  opt_run->add_option("--iters-phase2", run.iters_phase2)->capture_default_str();
  opt_run->add_option("--pi2", run.pi2, "Confidence threshold of phase 2")->capture_default_str();
  opt_run->add_option("--lambda", run.lambda_um, "Roughness bound in um")->capture_default_str();
  opt_run->add_option("--grid", run.grid_resolution, "Candidate grid points per dimension")->capture_default_str();
  opt_run->add_option("--out", run_out, "Trace CSV output path")->required();
  opt_run->add_option("--config", run_config, "Simulator config JSON");
  opt_run->add_option("--init", run_init, "Initialization data CSV (vp,em,roughness_um[,modulus_gpa])");

  cli::InitOptions init;
  std::string init_state, init_data, init_config;
  auto* opt_init = optimize->add_subcommand("init", "Create an operator session file");
  opt_init->add_option("--state", init_state, "Session file to create")->required();
  opt_init->add_option("--seed", init.seed)->capture_default_str();
  opt_init->add_option("--lambda", init.lambda_um)->capture_default_str();
  opt_init->add_option("--pi", init.pi)->capture_default_str();
  opt_init->add_option("--grid", init.grid_resolution)->capture_default_str();
  opt_init->add_option("--epsilon-speed", init.epsilon_speed)->capture_default_str();
  opt_init->add_option("--init", init_data, "Measured initialization CSV; default is a simulated sweep");
  opt_init->add_option("--config", init_config, "Simulator config JSON for the simulated sweep");
  opt_init->add_flag("--force", init.force, "Overwrite an existing session file");

  std::string suggest_state;
  std::optional<double> suggest_pi;
  auto* opt_suggest = optimize->add_subcommand("suggest", "Print the next parameters to try (vp,em)");
  opt_suggest->add_option("--state", suggest_state)->required();
  opt_suggest->add_option("--pi", suggest_pi, "Switch the confidence threshold before suggesting");

  cli::RecordOptions record;
  std::string record_state;
  std::optional<double> record_vp, record_em, record_modulus;
  auto* opt_record = optimize->add_subcommand("record", "Record the measured roughness of the last print");
  opt_record->add_option("--state", record_state)->required();
  opt_record->add_option("--roughness", record.roughness_um, "Global roughness in um")->required();
  opt_record->add_option("--vp", record_vp, "Override the pending print speed");
  opt_record->add_option("--em", record_em, "Override the pending extrusion multiplier");
  opt_record->add_option("--modulus", record_modulus, "Measured Young's modulus in GPa");

  // report ----------------------------------------------------------------
  std::string report_trace;
  auto* report = app.add_subcommand("report", "Summarize an optimization trace");
  report->add_option("--trace", report_trace, "Trace CSV")->required();

  // simulate --------------------------------------------------------------
  auto* simulate = app.add_subcommand("simulate", "Virtual printer utilities");
  simulate->require_subcommand(1);
  cli::SimulateScanOptions sim;
  std::string sim_out, sim_config;
  auto* sim_scan = simulate->add_subcommand("scan", "Write a synthetic scan CSV");
  sim_scan->add_option("--vp", sim.params.vp)->capture_default_str();
  sim_scan->add_option("--em", sim.params.em)->capture_default_str();
  sim_scan->add_option("--seed", sim.seed)->capture_default_str();
  sim_scan->add_option("--out", sim_out)->required();
  sim_scan->add_option("--config", sim_config);
  sim_scan->add_flag("--noise-free", sim.noise_free);
  sim_scan->add_option("--repeat", sim.repeat, "Repeated single-layer passes instead of a whole part")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  auto opt_path = [](const std::string& s) -> std::optional<cli::fs::path> {
    if (s.empty()) return std::nullopt;
    return cli::fs::path(s);
  };

  try {
    if (*scan_ra) {
      cli::scan_ra(ra_input, std::cout);
    } else if (*scan_stats) {
      std::vector<cli::fs::path> paths(stats_inputs.begin(), stats_inputs.end());
      cli::scan_stats(paths, std::cout);
    } else if (*opt_run) {
      run.out = run_out;
      run.config = opt_path(run_config);
      run.init = opt_path(run_init);
      const auto trace = cli::optimize_run(run);
      std::cout << "rows," << trace.size() << '\n';
    } else if (*opt_init) {
      init.state = init_state;
      init.init = opt_path(init_data);
      init.config = opt_path(init_config);
      cli::optimize_init(init, std::cout);
    } else if (*opt_suggest) {
      cli::optimize_suggest(suggest_state, suggest_pi, std::cout);
    } else if (*opt_record) {
      record.state = record_state;
      record.vp = record_vp;
      record.em = record_em;
      record.modulus_gpa = record_modulus;
      cli::optimize_record(record, std::cout);
    } else if (*report) {
      cli::report(report_trace, std::cout);
    } else if (*sim_scan) {
      sim.out = sim_out;
      sim.config = opt_path(sim_config);
      cli::simulate_scan(sim, std::cout);
    }
  } catch (const fffopt::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const fffopt::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 3;
  } catch (const fffopt::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
