#pragma once

// Command implementations behind the `fffopt` executable. Each writes its
// report to the given stream and throws on failure; the executable maps
// exceptions to a nonzero exit status.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "fffopt/optimizer.hpp"
#include "fffopt/profile.hpp"
#include "fffopt/simulator.hpp"

namespace fffopt::cli {

namespace fs = std::filesystem;

// ---- scan ----------------------------------------------------------------

/// `layer_index,ra_um` per layer, then `global,R`.
void scan_ra(const fs::path& input, std::ostream& out);

/// Statistics of the per-file global roughness. Needs at least two files.
StatsSummary scan_stats(std::span<const fs::path> inputs, std::ostream& out);

// ---- trace CSV -----------------------------------------------------------

struct TraceRow {
  int iteration = 0;
  double vp = 0.0;
  double em = 0.0;
  double roughness_um = 0.0;
  bool feasible = false;
  double phase_pi = 0.0;
  std::optional<double> best_feasible_vp;
  std::optional<double> modulus_gpa;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

/// Rows for `trace`, with the incumbent column computed over `prior` and the trace so far.
std::vector<TraceRow> make_trace_rows(std::span<const Observation> prior, std::span<const Observation> trace);

void write_trace_csv(std::ostream& out, std::span<const TraceRow> rows);
std::vector<TraceRow> read_trace_csv(std::istream& in);
std::vector<TraceRow> read_trace_csv(const fs::path& path);

// ---- optimize ------------------------------------------------------------

/// The seven-level extrusion sweep at 350 mm/s used to seed the model.
std::vector<PrintParameters> init_sweep();

struct InitRecord {
  PrintParameters params;
  double roughness_um = 0.0;
  std::optional<double> modulus_gpa;
};

/// Header `vp,em,roughness_um` with an optional trailing `modulus_gpa` column.
std::vector<InitRecord> read_init_csv(const fs::path& path);

struct RunOptions {
  std::uint64_t seed = 0;
  int iters_phase1 = 17;
  double pi1 = 0.4;
  int iters_phase2 = 14;
  double pi2 = 0.1;
  double lambda_um = 10.0;
  int grid_resolution = 101;
  fs::path out;
  std::optional<fs::path> config;
  std::optional<fs::path> init;
};

/// Closed loop against the virtual printer; writes the trace CSV to `out`.
std::vector<Observation> optimize_run(const RunOptions& options);

/// Same loop, returning the final state instead of writing files.
OptimizerState simulate_experiment(const RunOptions& options, std::vector<Observation>* trace = nullptr);

struct InitOptions {
  fs::path state;
  std::uint64_t seed = 0;
  double lambda_um = 10.0;
  double pi = 0.4;
  int grid_resolution = 101;
  double epsilon_speed = 9.8;
  std::optional<fs::path> init;    // measured initialization data
  std::optional<fs::path> config;  // simulator config for the default sweep
  bool force = false;
};

/// Creates a session file seeded with initialization data.
void optimize_init(const InitOptions& options, std::ostream& out);

/// Prints `vp,em`. A pending suggestion is returned unchanged; otherwise a new
/// one is computed and stored as pending. `pi`, when given, updates the
/// session's threshold first (rejected while a different-threshold suggestion is pending).
PrintParameters optimize_suggest(const fs::path& state, std::optional<double> pi, std::ostream& out);

struct RecordOptions {
  fs::path state;
  double roughness_um = 0.0;
  std::optional<double> vp;
  std::optional<double> em;
  std::optional<double> modulus_gpa;
};

/// Appends the measurement for the pending (or explicitly given) parameters and
/// prints the incumbent.
void optimize_record(const RecordOptions& options, std::ostream& out);

// ---- report --------------------------------------------------------------

struct ReportSummary {
  struct PhaseStats {
    double pi = 0.0;
    int iterations = 0;
    int feasible = 0;
    double fraction = 0.0;
  };
  std::vector<PhaseStats> phases;
  std::optional<TraceRow> best;
  std::optional<double> initial_feasible_vp;
  std::optional<double> speed_factor;
  sim::MechanicalSummary mechanical;
};

ReportSummary summarize_trace(std::span<const TraceRow> rows);
ReportSummary report(const fs::path& trace, std::ostream& out);

// ---- simulate ------------------------------------------------------------

struct SimulateScanOptions {
  PrintParameters params{35.0, 0.95};
  std::uint64_t seed = 0;
  fs::path out;
  std::optional<fs::path> config;
  bool noise_free = false;
  int repeat = 1;
};

/// Writes a whole-part scan; with repeat > 1, writes `repeat` single-layer
/// passes over one fixed layer instead (`<stem>_<i><ext>`, alternating direction).
std::vector<fs::path> simulate_scan(const SimulateScanOptions& options, std::ostream& out);

sim::SimulatorConfig load_config(const std::optional<fs::path>& path);

}  // namespace fffopt::cli
