#pragma once

// Virtual printer standing in for the physical machine.
//
// Ground truth is a closed-form roughness surface: a speed penalty plus two
// hinge penalties around a speed-dependent optimal extrusion e*(v_p), the
// over-extrusion side steeper than the under-extrusion side. Per-layer scans
// are sine ridges at the line distance whose amplitude reproduces each
// layer's target Ra, plus white sensor noise.

#include <optional>
#include <span>

#include <json.hpp>

#include "fffopt/optimizer.hpp"
#include "fffopt/params.hpp"
#include "fffopt/profile.hpp"
#include "fffopt/random.hpp"

namespace fffopt::sim {

struct SimulatorConfig {
  double r_floor = 4.0;        // um
  double speed_gain = 7.0;     // um
  double speed_ref = 150.0;    // mm/s
  double speed_exp = 1.5;
  double under_gain = 80.0;    // um, below 260 * sqrt(0.1) so over-extrusion dominates from 0.1 on
  double under_exp = 1.5;
  double over_gain = 260.0;    // um
  double over_exp = 2.0;
  double e_star_base = 0.95;
  double e_star_slope = 0.07;
  double noise_floor = 0.3;    // um
  double noise_frac = 0.03;
  double sensor_noise = 1.0;   // um
  double line_period = 0.4;    // mm
  int layers = 40;
  int samples_per_pass = 576;
  double sample_spacing = 8.33;  // um
  double modulus_base = 20.9;    // GPa
  double modulus_slope1 = 0.04;  // GPa/um
  double modulus_knee = 20.0;    // um
  double modulus_slope2 = 0.18;  // GPa/um
  double modulus_floor = 8.0;    // GPa
  double modulus_noise = 0.15;   // GPa

  /// Throws InvalidInput when a gain, exponent, period or count is not positive,
  /// a noise level is negative, or modulus_floor >= modulus_base.
  void validate() const;

  /// Copy with every noise source switched off.
  SimulatorConfig noise_free() const;

  friend bool operator==(const SimulatorConfig&, const SimulatorConfig&) = default;
};

/// Keys are the snake_case field names. Missing keys keep their defaults;
/// unknown keys raise ValidationError.
SimulatorConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimulatorConfig& config);

/// Extrusion multiplier with the lowest roughness at this speed.
double optimal_extrusion(double vp, const SimulatorConfig& config) noexcept;

double true_roughness(const PrintParameters& params, const SimulatorConfig& config) noexcept;

/// Ground truth plus Gaussian noise of std max(noise_floor, noise_frac * R), clamped to >= 0.1 um.
double measure_roughness(const PrintParameters& params, const SimulatorConfig& config, Rng& rng);

/// Noise-free surface of one layer section: the sine ridge pattern with Ra = target_ra.
std::vector<double> layer_surface(double target_ra_um, const SimulatorConfig& config);

/// One laser pass over a given surface, with sensor noise. `reversed` scans right to left.
ScanProfile scan_surface(std::span<const double> surface_um, int layer_index, const SimulatorConfig& config,
                         Rng& rng, bool reversed = false);

/// Prints every layer at `params` and scans each one once.
PartScan synthesize_part_scan(const PrintParameters& params, const SimulatorConfig& config, Rng& rng);

/// Piecewise-linear decreasing modulus with a knee, floored, plus Gaussian noise.
double surrogate_modulus(double roughness_um, const SimulatorConfig& config, Rng& rng);

struct MechanicalSummary {
  std::optional<double> mean_modulus_feasible;    // GPa
  std::optional<double> mean_modulus_infeasible;  // GPa
};

/// Group means of recorded moduli split by roughness <= lambda. Rows without a modulus are skipped.
MechanicalSummary summarize_mechanical(std::span<const Observation> trace, double lambda_um);

/// Evaluator for the closed loop: print, scan all layers, report global roughness
/// and a modulus drawn from the surrogate.
class VirtualPrinter {
 public:
  VirtualPrinter(SimulatorConfig config, std::uint64_t seed);

  Evaluation operator()(const PrintParameters& params);

  const SimulatorConfig& config() const noexcept { return config_; }

 private:
  SimulatorConfig config_;
  Rng rng_;
};

}  // namespace fffopt::sim
