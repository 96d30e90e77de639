// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fffopt/commands.hpp"
#include "fffopt/gp.hpp"
#include "fffopt/optimizer.hpp"
#include "fffopt/profile.hpp"
#include "fffopt/scan_io.hpp"
#include "fffopt/simulator.hpp"
#include "selection_oracle.hpp"

namespace fs = std::filesystem;
using namespace fffopt;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome ra_oracle() {
  double worst = 0;
  for (double a : {1.0, 5.0, 10.0}) {
    std::vector<double> z(1000);
    for (int i = 0; i < 1000; ++i) z[i] = a * std::sin(2 * std::numbers::pi * i / 1000.0);
    const double want = 2 * a / std::numbers::pi;
    worst = std::max(worst, std::abs(compute_ra(z) - want) / want);
  }
  return {worst < 0.005, "max rel err " + fmt(worst)};
}

Outcome repeatability() {
  sim::SimulatorConfig c;
  c.sensor_noise = 1.0;
  const auto surface = sim::layer_surface(70.99, c);
  int ok = 0;
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(derive_seed(seed, "repeatability"));
    std::vector<double> ra;
    for (int i = 0; i < 9; ++i) ra.push_back(compute_ra(sim::scan_surface(surface, 1, c, rng, i % 2 == 1)));
    const double cv = profile_stats(ra).cv;
    worst = std::max(worst, cv);
    if (cv < 0.01) ++ok;
  }
  return {ok >= 95, std::to_string(ok) + "/100 seeds cv < 1%, max cv " + fmt(worst)};
}

Outcome gp_correctness() {
  Rng rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  const ParameterBox box;
  std::vector<gp::TrainingPoint> data;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) {
      const auto p = box.denormalize({i / 3.0, j / 2.0});
      data.push_back({p, std::exp(1.5 + std::sin(3 * u(rng)) + p.vp / 300)});
    }
  gp::Hyperparameters h{{0.3, 0.4}, 1.2, 1e-8};
  const auto m = gp::GpModel::fit(data, h, box);

  double interp = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto p = m.predict(data[i].params);
    const double standardized = (p.mean_log - m.y_mean()) / m.y_std();
    interp = std::max(interp, std::abs(standardized - m.train_targets()[i]));
  }

  bool var_ok = true;
  const double prior = m.prior_std_log();
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) {
      const auto p = m.predict_unit({i / 49.0, j / 49.0});
      if (!(p.std_log <= prior * (1 + 1e-12))) var_ok = false;
    }

  gp::Hyperparameters loose{{0.3, 0.4}, 1.2, 0.05};
  const auto ml = gp::GpModel::fit(data, loose, box);
  double pf_err = 0;
  std::normal_distribution<double> z(0, 1);
  const double lambda = 10.0;
  for (int q = 0; q < 20; ++q) {
    const PrintParameters x{10 + 490 * u(rng), 0.5 + u(rng)};
    const auto p = ml.predict(x);
    int hits = 0;
    const int draws = 100000;
    for (int k = 0; k < draws; ++k)
      if (std::exp(p.mean_log + p.std_log * z(rng)) <= lambda) ++hits;
    pf_err = std::max(pf_err, std::abs(gp::probability_of_feasibility(p, lambda) - double(hits) / draws));
  }
  return {interp <= 1e-6 && var_ok && pf_err <= 0.005,
          "interp err " + fmt(interp) + ", var<=prior " + (var_ok ? "yes" : "no") + ", PF vs MC " + fmt(pf_err)};
}

Outcome acquisition_oracle() {
  Rng rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  int match = 0, aggressive = 0;
  for (int t = 0; t < 50; ++t) {
    OptimizerState s;
    s.seed = t;
    sim::VirtualPrinter printer(sim::SimulatorConfig{}, t);
    for (const auto& p : cli::init_sweep()) {
      const auto e = printer(p);
      add_initial_observation(s, p, e.roughness_um, e.modulus_gpa);
    }
    s.hyper_cache = effective_hyperparameters(s);
    const int steps = 1 + int(u(rng) * 12);
    const std::vector<Phase> schedule{{steps, u(rng)}};
    run_closed_loop(s, std::ref(printer), schedule);
    s.pi = u(rng);
    const auto got = suggest_detailed(s);
    const auto want = testing::oracle_pick(s);
    if (got.grid_index == want.index && got.branch == want.branch) ++match;
    if (got.branch == Branch::aggressive) ++aggressive;
  }
  return {match == 50, std::to_string(match) + "/50 identical (" + std::to_string(aggressive) + " aggressive)"};
}

struct Experiments {
  std::vector<std::vector<Observation>> two_phase;
  std::vector<std::vector<Observation>> only_low;
  std::vector<std::vector<Observation>> only_high;
};

std::vector<Observation> run_experiment(std::uint64_t seed, int n1, double pi1, int n2, double pi2) {
  cli::RunOptions o;
  o.seed = seed;
  o.iters_phase1 = n1;
  o.pi1 = pi1;
  o.iters_phase2 = n2;
  o.pi2 = pi2;
  std::vector<Observation> trace;
  cli::simulate_experiment(o, &trace);
  return trace;
}

Outcome closed_loop(const Experiments& ex) {
  std::vector<double> early, final;
  int with_incumbent = 0;
  bool monotone = true;
  for (const auto& trace : ex.two_phase) {
    const auto rows = cli::make_trace_rows({}, trace);
    double prev = -1;
    for (const auto& r : rows)
      if (r.best_feasible_vp) {
        if (*r.best_feasible_vp < prev) monotone = false;
        prev = *r.best_feasible_vp;
      }
    const auto e = best_feasible(std::span(trace).first(5));
    early.push_back(e ? e->params.vp : 0.0);
    const auto f = best_feasible(trace);
    final.push_back(f ? f->params.vp : 0.0);
    if (f) ++with_incumbent;
  }
  const double m_early = median(early), m_final = median(final);
  const bool ok = m_final >= 2 * m_early && monotone && with_incumbent >= 18;
  return {ok, "median final " + fmt(m_final) + " vs 2 x median after 5 = " + fmt(2 * m_early) + ", monotone " +
                  (monotone ? "yes" : "no") + ", incumbent in " + std::to_string(with_incumbent) + "/20"};
}

Outcome pi_ordering(const Experiments& ex) {
  double ff_low = 0, ff_high = 0, v_low = 0, v_high = 0;
  const double n = ex.only_low.size();
  for (std::size_t i = 0; i < ex.only_low.size(); ++i) {
    ff_low += feasible_fraction(ex.only_low[i]) / n;
    ff_high += feasible_fraction(ex.only_high[i]) / n;
    const auto a = best_feasible(ex.only_low[i]);
    const auto b = best_feasible(ex.only_high[i]);
    v_low += (a ? a->params.vp : 0.0) / n;
    v_high += (b ? b->params.vp : 0.0) / n;
  }
  return {ff_low < ff_high && v_low >= v_high, "feasible fraction " + fmt(ff_low) + " (pi 0.1) vs " + fmt(ff_high) +
                                                   " (pi 0.4), best speed " + fmt(v_low) + " vs " + fmt(v_high)};
}

Outcome mechanical(const Experiments& ex) {
  int ok = 0;
  for (const auto& trace : ex.two_phase) {
    const auto s = sim::summarize_mechanical(trace, 10.0);
    if (s.mean_modulus_feasible && s.mean_modulus_infeasible && *s.mean_modulus_feasible > *s.mean_modulus_infeasible)
      ++ok;
  }
  return {ok >= 18, std::to_string(ok) + "/20 seeds feasible E > infeasible E"};
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "fffopt_acceptance";
  fs::create_directories(dir);
  cli::RunOptions o;
  o.seed = 42;
  o.out = dir / "a.csv";
  cli::optimize_run(o);
  o.out = dir / "b.csv";
  cli::optimize_run(o);
  const auto a = slurp(dir / "a.csv"), b = slurp(dir / "b.csv");
  fs::remove_all(dir);
  return {!a.empty() && a == b, std::to_string(a.size()) + " bytes, identical " + (a == b ? "yes" : "no")};
}

double ra_via_cli(const PartScan& part, const fs::path& file) {
  write_scan_csv(file, part);
  std::ostringstream out;
  cli::scan_ra(file, out);
  const std::string text = out.str();
  const auto pos = text.rfind("global,");
  return std::stod(text.substr(pos + 7));
}

Outcome round_trip() {
  const fs::path dir = fs::temp_directory_path() / "fffopt_roundtrip";
  fs::create_directories(dir);
  const sim::SimulatorConfig c;
  double worst_noisy = 0, worst_clean = 0;
  const std::vector<PrintParameters> points{{35, 0.95}, {64.4, 0.9}, {103.5, 1.05}, {250, 0.7}, {350, 1.5}};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double truth = sim::true_roughness(points[i], c);
    Rng a(derive_seed(i, "roundtrip"));
    worst_noisy = std::max(
        worst_noisy, std::abs(ra_via_cli(sim::synthesize_part_scan(points[i], c, a), dir / "n.csv") - truth) / truth);
    Rng b(derive_seed(i, "roundtrip"));
    worst_clean = std::max(
        worst_clean,
        std::abs(ra_via_cli(sim::synthesize_part_scan(points[i], c.noise_free(), b), dir / "c.csv") - truth) / truth);
  }
  fs::remove_all(dir);
  return {worst_noisy <= 0.03 && worst_clean <= 0.01,
          "max rel err " + fmt(worst_noisy) + " default noise, " + fmt(worst_clean) + " noise free"};
}

using Clock = std::chrono::steady_clock;

bool report(int id, const char* name, double limit_s, const std::function<Outcome()>& f) {
  const auto t0 = Clock::now();
  Outcome o = f();
  const double s = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool in_time = limit_s <= 0 || s < limit_s;
  const bool pass = o.pass && in_time;
  std::printf("[%s] %d %s: %s; %.2f s", pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), s);
  if (limit_s > 0) std::printf(" (limit %.0f s)", limit_s);
  std::printf("\n");
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main() {
  int failed = 0;
  auto check = [&](bool ok) { failed += ok ? 0 : 1; };

  check(report(1, "Ra of sine profiles", 1, ra_oracle));
  check(report(2, "repeatability of one layer", 5, repeatability));
  check(report(3, "GP correctness", 10, gp_correctness));
  check(report(4, "acquisition oracle", 60, acquisition_oracle));

  Experiments ex;
  const auto t0 = Clock::now();
  for (std::uint64_t seed = 0; seed < 20; ++seed) ex.two_phase.push_back(run_experiment(seed, 17, 0.4, 14, 0.1));
  const double loop_s = std::chrono::duration<double>(Clock::now() - t0).count();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ex.only_low.push_back(run_experiment(seed, 31, 0.1, 0, 0.1));
    ex.only_high.push_back(run_experiment(seed, 31, 0.4, 0, 0.4));
  }

  check(report(5, "closed loop speed gain", 120 - loop_s, [&] { return closed_loop(ex); }));
  check(report(6, "pi ordering", 0, [&] { return pi_ordering(ex); }));
  check(report(7, "mechanical ordering", 0, [&] { return mechanical(ex); }));
  check(report(8, "determinism", 0, determinism));
  check(report(9, "scan round trip", 0, round_trip));

  std::printf("closed loop runs: %.2f s for 20 seeds\n", loop_s);
  std::printf("%d of 9 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
