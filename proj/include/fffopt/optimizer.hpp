#pragma once

// Constrained Bayesian optimization of print speed under a roughness bound.
//
// The objective (v_p) is known in closed form; only the roughness constraint
// R(v_p, e_m) <= lambda is learned, by the log-roughness GP. Each suggestion
// chooses one of two acquisitions on a uniform candidate grid depending on how
// confident the model is that some faster-than-incumbent point is feasible.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fffopt/gp.hpp"
#include "fffopt/params.hpp"

namespace fffopt {

struct Observation {
  PrintParameters params;
  double roughness_um = 0.0;
  bool feasible = false;
  std::optional<double> modulus_gpa;
  int iteration = 0;                 // 0 for initialization data, 1.. for optimizer proposals
  std::optional<double> phase_pi;    // pi in force when proposed; empty for initialization data

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct OptimizerState {
  std::vector<Observation> observations;
  ParameterBox bounds;
  double lambda_um = 10.0;
  double pi = 0.4;
  int grid_resolution = 101;
  double epsilon_speed = 9.8;  // mm/s, 2% of the default speed range
  std::uint64_t seed = 0;
  std::optional<gp::Hyperparameters> hyper_cache;

  /// Throws InvalidInput on lambda <= 0, pi outside [0,1], resolution < 2 or epsilon <= 0.
  void validate() const;

  friend bool operator==(const OptimizerState&, const OptimizerState&) = default;
};

/// Candidate point k is (i_v, i_e) = (k / res, k % res), speeds ascending.
std::vector<PrintParameters> candidate_grid(const ParameterBox& bounds, int resolution);

/// Appends one initialization observation (iteration 0, no phase). Feasibility is recomputed.
void add_initial_observation(OptimizerState& state, const PrintParameters& params, double roughness_um,
                             std::optional<double> modulus_gpa = std::nullopt);

std::vector<gp::TrainingPoint> training_data(const OptimizerState& state);

/// The hyperparameters suggest() uses: the cache, or a fresh selection when absent.
gp::Hyperparameters effective_hyperparameters(const OptimizerState& state);

enum class Branch {
  aggressive,  // confident: fastest candidate with PF >= pi
  cautious,    // not confident: most probably feasible candidate at least epsilon faster
  fallback,    // cautious filter empty: most probably feasible candidate anywhere
};

const char* to_string(Branch b) noexcept;

struct Suggestion {
  PrintParameters params;
  Branch branch = Branch::aggressive;
  std::size_t grid_index = 0;
  double confidence = 0.0;  // max PF over candidates strictly faster than the incumbent
  double pf = 0.0;          // PF of the chosen point
  double std_log = 0.0;     // posterior std of the chosen point
};

/// Throws NeedsInitialization when there are no observations.
Suggestion suggest_detailed(const OptimizerState& state);
PrintParameters suggest(const OptimizerState& state);

/// Records a measured print. Throws InvalidInput for out-of-box parameters or R <= 0.
void update(OptimizerState& state, const PrintParameters& params, double roughness_um,
            std::optional<double> modulus_gpa = std::nullopt);

struct Incumbent {
  PrintParameters params;
  double roughness_um = 0.0;
};

/// Fastest feasible observation, ties broken by lower roughness.
std::optional<Incumbent> best_feasible(std::span<const Observation> observations);
std::optional<Incumbent> best_feasible(const OptimizerState& state);

/// Feasible share, optionally restricted to observations proposed under `phase_pi`.
/// Throws InvalidInput when the (filtered) set is empty.
double feasible_fraction(std::span<const Observation> observations, std::optional<double> phase_pi = std::nullopt);
double feasible_fraction(const OptimizerState& state, std::optional<double> phase_pi = std::nullopt);

struct Evaluation {
  double roughness_um = 0.0;
  std::optional<double> modulus_gpa;
};

using Evaluator = std::function<Evaluation(const PrintParameters&)>;

struct Phase {
  int iterations = 0;
  double pi = 0.0;
};

/// Runs suggest -> evaluate -> update for each phase in turn and returns the
/// observations it added, in order.
std::vector<Observation> run_closed_loop(OptimizerState& state, const Evaluator& evaluator,
                                         std::span<const Phase> schedule);

}  // namespace fffopt
