#include "fffopt/optimizer.hpp"

#include <cmath>
#include <limits>

#include "fffopt/error.hpp"
#include "fffopt/random.hpp"

namespace fffopt {

void OptimizerState::validate() const {
  bounds.validate();
  if (!(lambda_um > 0.0) || !std::isfinite(lambda_um)) throw InvalidInput("lambda must be positive");
  if (!(pi >= 0.0 && pi <= 1.0)) throw InvalidInput("pi must lie in [0, 1]");
  if (grid_resolution < 2) throw InvalidInput("grid resolution must be >= 2");
  if (!(epsilon_speed > 0.0) || !std::isfinite(epsilon_speed))
    throw InvalidInput("epsilon_speed must be positive");
}

std::vector<PrintParameters> candidate_grid(const ParameterBox& bounds, int resolution) {
  if (resolution < 2) throw InvalidInput("grid resolution must be >= 2");
  const auto res = static_cast<std::size_t>(resolution);
  auto axis = [res](double lo, double hi) {
    std::vector<double> v(res);
    for (std::size_t i = 0; i < res; ++i)
      v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(res - 1);
    v.back() = hi;
    return v;
  };
  const auto speeds = axis(bounds.vp_min, bounds.vp_max);
  const auto extrusions = axis(bounds.em_min, bounds.em_max);
  std::vector<PrintParameters> grid;
  grid.reserve(res * res);
  for (double v : speeds)
    for (double e : extrusions) grid.push_back({v, e});
  return grid;
}

namespace {

void check_measurement(const OptimizerState& state, const PrintParameters& params, double roughness_um) {
  if (!state.bounds.contains(params)) throw InvalidInput("print parameters outside the box");
  if (!(roughness_um > 0.0) || !std::isfinite(roughness_um))
    throw InvalidInput("roughness must be positive");
}

}  // namespace

void add_initial_observation(OptimizerState& state, const PrintParameters& params, double roughness_um,
                             std::optional<double> modulus_gpa) {
  check_measurement(state, params, roughness_um);
  state.observations.push_back(
      {params, roughness_um, roughness_um <= state.lambda_um, modulus_gpa, 0, std::nullopt});
}

std::vector<gp::TrainingPoint> training_data(const OptimizerState& state) {
  std::vector<gp::TrainingPoint> data;
  data.reserve(state.observations.size());
  for (const auto& o : state.observations) data.push_back({o.params, o.roughness_um});
  return data;
}

gp::Hyperparameters effective_hyperparameters(const OptimizerState& state) {
  if (state.hyper_cache) return *state.hyper_cache;
  return gp::select_hyperparameters(training_data(state), state.bounds, std::nullopt,
                                    derive_seed(state.seed, "hyper", state.observations.size()));
}

const char* to_string(Branch b) noexcept {
  switch (b) {
    case Branch::aggressive: return "aggressive";
    case Branch::cautious: return "cautious";
    case Branch::fallback: return "fallback";
  }
  return "unknown";
}

Suggestion suggest_detailed(const OptimizerState& state) {
  if (state.observations.empty())
    throw NeedsInitialization("the optimizer needs at least one observation before suggesting");
  state.validate();

  const auto data = training_data(state);
  const auto model = gp::GpModel::fit(data, effective_hyperparameters(state), state.bounds);
  const auto grid = candidate_grid(state.bounds, state.grid_resolution);

  std::vector<double> pf(grid.size());
  std::vector<double> sd(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto pred = model.predict(grid[k]);
    pf[k] = gp::probability_of_feasibility(pred, state.lambda_um);
    sd[k] = pred.std_log;
  }

  const auto incumbent = best_feasible(state);
  const double v_best = incumbent ? incumbent->params.vp : -std::numeric_limits<double>::infinity();

  double confidence = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (grid[k].vp > v_best) confidence = std::max(confidence, pf[k]);

  Suggestion s;
  s.confidence = confidence;
  std::optional<std::size_t> pick;

  if (confidence >= state.pi) {
    s.branch = Branch::aggressive;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (!(pf[k] >= state.pi)) continue;
      if (!pick || grid[k].vp > grid[*pick].vp || (grid[k].vp == grid[*pick].vp && pf[k] > pf[*pick]))
        pick = k;
    }
  } else {
    auto better = [&](std::size_t k, std::size_t cur) {
      return pf[k] > pf[cur] || (pf[k] == pf[cur] && sd[k] > sd[cur]);
    };
    s.branch = Branch::cautious;
    const double floor = v_best + state.epsilon_speed;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (!(grid[k].vp >= floor)) continue;
      if (!pick || better(k, *pick)) pick = k;
    }
    if (!pick) {
      s.branch = Branch::fallback;
      for (std::size_t k = 0; k < grid.size(); ++k)
        if (!pick || better(k, *pick)) pick = k;
    }
  }

  // The aggressive set holds at least the point attaining the confidence,
  // and the fallback ranges over the whole grid, so a pick always exists.
  s.grid_index = *pick;
  s.params = grid[*pick];
  s.pf = pf[*pick];
  s.std_log = sd[*pick];
  return s;
}

PrintParameters suggest(const OptimizerState& state) { return suggest_detailed(state).params; }

void update(OptimizerState& state, const PrintParameters& params, double roughness_um,
            std::optional<double> modulus_gpa) {
  state.validate();
  check_measurement(state, params, roughness_um);
  int last = 0;
  for (const auto& o : state.observations) last = std::max(last, o.iteration);
  state.observations.push_back(
      {params, roughness_um, roughness_um <= state.lambda_um, modulus_gpa, last + 1, state.pi});
  state.hyper_cache =
      gp::select_hyperparameters(training_data(state), state.bounds, state.hyper_cache,
                                 derive_seed(state.seed, "hyper", state.observations.size()));
}

std::optional<Incumbent> best_feasible(std::span<const Observation> observations) {
  std::optional<Incumbent> best;
  for (const auto& o : observations) {
    if (!o.feasible) continue;
    if (!best || o.params.vp > best->params.vp ||
        (o.params.vp == best->params.vp && o.roughness_um < best->roughness_um))
      best = Incumbent{o.params, o.roughness_um};
  }
  return best;
}

std::optional<Incumbent> best_feasible(const OptimizerState& state) { return best_feasible(state.observations); }

double feasible_fraction(std::span<const Observation> observations, std::optional<double> phase_pi) {
  std::size_t total = 0;
  std::size_t feasible = 0;
  for (const auto& o : observations) {
    if (phase_pi && o.phase_pi != phase_pi) continue;
    ++total;
    if (o.feasible) ++feasible;
  }
  if (total == 0) throw InvalidInput("no observations to compute a feasible fraction over");
  return static_cast<double>(feasible) / static_cast<double>(total);
}

double feasible_fraction(const OptimizerState& state, std::optional<double> phase_pi) {
  return feasible_fraction(state.observations, phase_pi);
}

std::vector<Observation> run_closed_loop(OptimizerState& state, const Evaluator& evaluator,
                                         std::span<const Phase> schedule) {
  if (schedule.empty()) throw InvalidInput("empty phase schedule");
  if (state.observations.empty())
    throw NeedsInitialization("closed loop needs initialization data");
  for (const auto& phase : schedule)
    if (phase.iterations < 0 || !(phase.pi >= 0.0 && phase.pi <= 1.0))
      throw InvalidInput("phase needs iterations >= 0 and pi in [0, 1]");

  std::vector<Observation> trace;
  for (const auto& phase : schedule) {
    state.pi = phase.pi;
    for (int i = 0; i < phase.iterations; ++i) {
      const auto x = suggest(state);
      const auto result = evaluator(x);
      update(state, x, result.roughness_um, result.modulus_gpa);
      trace.push_back(state.observations.back());
    }
  }
  return trace;
}

}  // namespace fffopt
