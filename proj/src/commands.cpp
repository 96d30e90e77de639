#include "fffopt/commands.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "fffopt/error.hpp"
#include "fffopt/random.hpp"
#include "fffopt/scan_io.hpp"
#include "fffopt/state_io.hpp"
#include "fffopt/text.hpp"

namespace fffopt::cli {

using text::format_number;

namespace {

constexpr std::string_view kTraceHeader =
    "iteration,vp,em,roughness_um,feasible,phase_pi,best_feasible_vp,modulus_gpa";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("<file>", "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write-then-rename so an interrupted command never leaves a truncated file.
void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw InvalidInput("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string optional_number(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

// Single writer: the session is rewritten only if the file still holds the bytes it was read from.
class SessionFile {
 public:
  explicit SessionFile(fs::path path) : path_(std::move(path)), original_(read_file(path_)) {
    session_ = parse_session(original_);
  }

  Session& session() noexcept { return session_; }

  void commit() {
    if (read_file(path_) != original_)
      throw ValidationError("state_hash", "state file changed since it was read; rerun the command");
    write_file_atomic(path_, serialize_session(session_));
  }

 private:
  fs::path path_;
  std::string original_;
  Session session_;
};

void print_incumbent(const OptimizerState& state, std::ostream& out) {
  if (const auto best = best_feasible(state))
    out << "best_feasible," << format_number(best->params.vp) << ',' << format_number(best->params.em) << ','
        << format_number(best->roughness_um) << '\n';
  else
    out << "best_feasible,none\n";
}

}  // namespace

void scan_ra(const fs::path& input, std::ostream& out) {
  const PartScan part = read_scan_csv(input);
  for (const auto& layer : part.profiles())
    out << layer.layer_index() << ',' << format_number(compute_ra(layer)) << '\n';
  out << "global," << format_number(global_roughness(part)) << '\n';
}

StatsSummary scan_stats(std::span<const fs::path> inputs, std::ostream& out) {
  if (inputs.size() < 2) throw UsageError("scan stats needs at least two scan files");
  std::vector<double> values;
  for (const auto& p : inputs) values.push_back(global_roughness(read_scan_csv(p)));
  const auto s = profile_stats(values);
  out << "count," << values.size() << '\n'
      << "minimum_um," << format_number(s.minimum) << '\n'
      << "maximum_um," << format_number(s.maximum) << '\n'
      << "mean_um," << format_number(s.mean) << '\n'
      << "std_um," << format_number(s.std) << '\n'
      << "cv," << format_number(s.cv) << '\n';
  return s;
}

std::vector<TraceRow> make_trace_rows(std::span<const Observation> prior, std::span<const Observation> trace) {
  std::optional<double> best;
  if (const auto inc = best_feasible(prior)) best = inc->params.vp;
  std::vector<TraceRow> rows;
  for (const auto& o : trace) {
    if (o.feasible && (!best || o.params.vp > *best)) best = o.params.vp;
    rows.push_back({o.iteration, o.params.vp, o.params.em, o.roughness_um, o.feasible, o.phase_pi.value_or(0.0),
                    best, o.modulus_gpa});
  }
  return rows;
}

void write_trace_csv(std::ostream& out, std::span<const TraceRow> rows) {
  out << kTraceHeader << '\n';
  for (const auto& r : rows)
    out << r.iteration << ',' << format_number(r.vp) << ',' << format_number(r.em) << ','
        << format_number(r.roughness_um) << ',' << (r.feasible ? "true" : "false") << ','
        << format_number(r.phase_pi) << ',' << optional_number(r.best_feasible_vp) << ','
        << optional_number(r.modulus_gpa) << '\n';
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || text::chomp(line) != kTraceHeader)
    throw ParseError(1, "expected header '" + std::string(kTraceHeader) + "'");
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = text::chomp(line);
    if (row.empty()) continue;
    const auto f = text::split_csv(row);
    if (f.size() != 8) throw ParseError(line_no, "expected 8 fields");
    TraceRow r;
    const auto it = text::parse_int(f[0]);
    const auto vp = text::parse_double(f[1]);
    const auto em = text::parse_double(f[2]);
    const auto rough = text::parse_double(f[3]);
    const auto pi = text::parse_double(f[5]);
    if (!it || !vp || !em || !rough || !pi) throw ParseError(line_no, "bad numeric field");
    if (f[4] != "true" && f[4] != "false") throw ParseError(line_no, "feasible must be true or false");
    r.iteration = static_cast<int>(*it);
    r.vp = *vp;
    r.em = *em;
    r.roughness_um = *rough;
    r.feasible = f[4] == "true";
    r.phase_pi = *pi;
    if (!f[6].empty()) {
      r.best_feasible_vp = text::parse_double(f[6]);
      if (!r.best_feasible_vp) throw ParseError(line_no, "bad best_feasible_vp");
    }
    if (!f[7].empty()) {
      r.modulus_gpa = text::parse_double(f[7]);
      if (!r.modulus_gpa) throw ParseError(line_no, "bad modulus_gpa");
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<TraceRow> read_trace_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open trace " + path.string());
  return read_trace_csv(in);
}

std::vector<PrintParameters> init_sweep() {
  std::vector<PrintParameters> sweep;
  for (double em : {0.7, 0.8, 0.9, 1.0, 1.1, 1.3, 1.5}) sweep.push_back({350.0, em});
  return sweep;
}

std::vector<InitRecord> read_init_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open init data " + path.string());
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(1, "empty init file");
  const auto header = text::chomp(line);
  std::size_t columns = 0;
  if (header == "vp,em,roughness_um")
    columns = 3;
  else if (header == "vp,em,roughness_um,modulus_gpa")
    columns = 4;
  else
    throw ParseError(1, "expected header 'vp,em,roughness_um[,modulus_gpa]'");
  std::vector<InitRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = text::chomp(line);
    if (row.empty()) continue;
    const auto f = text::split_csv(row);
    if (f.size() != columns) throw ParseError(line_no, "expected " + std::to_string(columns) + " fields");
    const auto vp = text::parse_double(f[0]);
    const auto em = text::parse_double(f[1]);
    const auto r = text::parse_double(f[2]);
    if (!vp || !em || !r) throw ParseError(line_no, "bad numeric field");
    InitRecord rec{{*vp, *em}, *r, std::nullopt};
    if (columns == 4 && !f[3].empty()) {
      rec.modulus_gpa = text::parse_double(f[3]);
      if (!rec.modulus_gpa) throw ParseError(line_no, "bad modulus_gpa");
    }
    records.push_back(rec);
  }
  if (records.empty()) throw ParseError(line_no, "init file has no rows");
  return records;
}

sim::SimulatorConfig load_config(const std::optional<fs::path>& path) {
  if (!path) return {};
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(*path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("<root>", std::string("malformed simulator config: ") + e.what());
  }
  return sim::config_from_json(j);
}

OptimizerState simulate_experiment(const RunOptions& options, std::vector<Observation>* trace) {
  if (options.iters_phase1 < 0 || options.iters_phase2 < 0) throw UsageError("iteration counts must be >= 0");
  if (options.iters_phase1 + options.iters_phase2 == 0) throw UsageError("nothing to run: both phases are empty");

  sim::VirtualPrinter printer(load_config(options.config), options.seed);

  OptimizerState state;
  state.lambda_um = options.lambda_um;
  state.grid_resolution = options.grid_resolution;
  state.seed = options.seed;
  state.pi = options.pi1;
  state.validate();

  if (options.init) {
    for (const auto& rec : read_init_csv(*options.init))
      add_initial_observation(state, rec.params, rec.roughness_um, rec.modulus_gpa);
  } else {
    for (const auto& p : init_sweep()) {
      const auto e = printer(p);
      add_initial_observation(state, p, e.roughness_um, e.modulus_gpa);
    }
  }
  state.hyper_cache = effective_hyperparameters(state);

  std::vector<Phase> schedule;
  if (options.iters_phase1 > 0) schedule.push_back({options.iters_phase1, options.pi1});
  if (options.iters_phase2 > 0) schedule.push_back({options.iters_phase2, options.pi2});

  auto added = run_closed_loop(state, std::ref(printer), schedule);
  if (trace) *trace = std::move(added);
  return state;
}

std::vector<Observation> optimize_run(const RunOptions& options) {
  if (options.out.empty()) throw UsageError("--out is required");
  std::vector<Observation> trace;
  const auto state = simulate_experiment(options, &trace);
  const std::span<const Observation> all(state.observations);
  const auto prior = all.first(all.size() - trace.size());

  std::ostringstream csv;
  write_trace_csv(csv, make_trace_rows(prior, trace));
  std::ofstream out(options.out, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write trace to " + options.out.string());
  out << csv.str();
  if (!out.flush()) throw InvalidInput("write failed for " + options.out.string());
  return trace;
}

void optimize_init(const InitOptions& options, std::ostream& out) {
  if (options.state.empty()) throw UsageError("--state is required");
  if (fs::exists(options.state) && !options.force)
    throw UsageError("state file " + options.state.string() + " exists; pass --force to overwrite");

  Session session;
  auto& state = session.state;
  state.lambda_um = options.lambda_um;
  state.pi = options.pi;
  state.grid_resolution = options.grid_resolution;
  state.epsilon_speed = options.epsilon_speed;
  state.seed = options.seed;
  state.validate();

  if (options.init) {
    for (const auto& rec : read_init_csv(*options.init))
      add_initial_observation(state, rec.params, rec.roughness_um, rec.modulus_gpa);
  } else {
    sim::VirtualPrinter printer(load_config(options.config), options.seed);
    for (const auto& p : init_sweep()) {
      const auto e = printer(p);
      add_initial_observation(state, p, e.roughness_um, e.modulus_gpa);
    }
  }
  state.hyper_cache = effective_hyperparameters(state);
  write_file_atomic(options.state, serialize_session(session));
  out << "observations," << state.observations.size() << '\n';
  print_incumbent(state, out);
}

PrintParameters optimize_suggest(const fs::path& state_path, std::optional<double> pi, std::ostream& out) {
  SessionFile file(state_path);
  auto& session = file.session();
  auto& state = session.state;
  if (pi && !(*pi >= 0.0 && *pi <= 1.0)) throw UsageError("--pi must lie in [0, 1]");

  if (session.pending && (!pi || *pi == state.pi)) {
    out << format_number(session.pending->vp) << ',' << format_number(session.pending->em) << '\n';
    return *session.pending;
  }
  if (session.pending)
    throw UsageError("a suggestion made under a different pi is pending; record it first");

  if (pi) state.pi = *pi;
  const auto x = suggest(state);
  session.pending = x;
  file.commit();
  out << format_number(x.vp) << ',' << format_number(x.em) << '\n';
  return x;
}

void optimize_record(const RecordOptions& options, std::ostream& out) {
  if (options.vp.has_value() != options.em.has_value())
    throw UsageError("--vp and --em must be given together");
  if (!(options.roughness_um > 0.0)) throw InvalidInput("roughness must be positive");

  SessionFile file(options.state);
  auto& session = file.session();
  PrintParameters x;
  if (options.vp)
    x = {*options.vp, *options.em};
  else if (session.pending)
    x = *session.pending;
  else
    throw UsageError("no pending suggestion; run `optimize suggest` or pass --vp and --em");

  update(session.state, x, options.roughness_um, options.modulus_gpa);
  session.pending.reset();
  file.commit();
  print_incumbent(session.state, out);
}

ReportSummary summarize_trace(std::span<const TraceRow> rows) {
  if (rows.empty()) throw UsageError("trace has no rows");
  ReportSummary s;
  for (const auto& r : rows) {
    if (s.phases.empty() || s.phases.back().pi != r.phase_pi) s.phases.push_back({r.phase_pi, 0, 0, 0.0});
    auto& ph = s.phases.back();
    ++ph.iterations;
    if (r.feasible) ++ph.feasible;
  }
  for (auto& ph : s.phases) ph.fraction = static_cast<double>(ph.feasible) / static_cast<double>(ph.iterations);

  double sum_f = 0.0, sum_i = 0.0;
  int n_f = 0, n_i = 0;
  for (const auto& r : rows) {
    if (r.feasible) {
      if (!s.initial_feasible_vp) s.initial_feasible_vp = r.vp;
      if (!s.best || r.vp > s.best->vp || (r.vp == s.best->vp && r.roughness_um < s.best->roughness_um))
        s.best = r;
    }
    if (r.modulus_gpa) {
      (r.feasible ? sum_f : sum_i) += *r.modulus_gpa;
      ++(r.feasible ? n_f : n_i);
    }
  }
  if (s.best) s.speed_factor = s.best->vp / *s.initial_feasible_vp;
  if (n_f > 0) s.mechanical.mean_modulus_feasible = sum_f / n_f;
  if (n_i > 0) s.mechanical.mean_modulus_infeasible = sum_i / n_i;
  return s;
}

ReportSummary report(const fs::path& trace, std::ostream& out) {
  const auto rows = read_trace_csv(trace);
  const auto s = summarize_trace(rows);
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string("none"); };
  out << "phase_pi,iterations,feasible,feasible_fraction\n";
  for (const auto& ph : s.phases)
    out << format_number(ph.pi) << ',' << ph.iterations << ',' << ph.feasible << ',' << format_number(ph.fraction)
        << '\n';
  if (s.best)
    out << "best_feasible," << format_number(s.best->vp) << ',' << format_number(s.best->em) << ','
        << format_number(s.best->roughness_um) << '\n';
  else
    out << "best_feasible,none\n";
  out << "initial_feasible_vp," << opt(s.initial_feasible_vp) << '\n'
      << "speed_factor," << opt(s.speed_factor) << '\n'
      << "mean_modulus_feasible_gpa," << opt(s.mechanical.mean_modulus_feasible) << '\n'
      << "mean_modulus_infeasible_gpa," << opt(s.mechanical.mean_modulus_infeasible) << '\n';
  return s;
}

std::vector<fs::path> simulate_scan(const SimulateScanOptions& options, std::ostream& out) {
  if (options.out.empty()) throw UsageError("--out is required");
  if (options.repeat < 1) throw UsageError("--repeat must be >= 1");
  auto config = load_config(options.config);
  if (options.noise_free) config = config.noise_free();
  ParameterBox box;
  if (!box.contains(options.params)) throw InvalidInput("print parameters outside the default box");
  Rng rng(derive_seed(options.seed, "simulator"));

  std::vector<fs::path> written;
  if (options.repeat == 1) {
    write_scan_csv(options.out, sim::synthesize_part_scan(options.params, config, rng));
    written.push_back(options.out);
  } else {
    const double target = sim::measure_roughness(options.params, config, rng);
    const auto surface = sim::layer_surface(target, config);
    for (int i = 1; i <= options.repeat; ++i) {
      fs::path p = options.out.parent_path() /
                   (options.out.stem().string() + "_" + std::to_string(i) + options.out.extension().string());
      std::vector<ScanProfile> layer{sim::scan_surface(surface, 1, config, rng, i % 2 == 0)};
      write_scan_csv(p, PartScan(std::move(layer)));
      written.push_back(p);
    }
  }
  for (const auto& p : written) out << p.string() << '\n';
  return written;
}

}  // namespace fffopt::cli
