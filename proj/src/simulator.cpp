#include "fffopt/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fffopt/error.hpp"

namespace fffopt::sim {

namespace {

// Field table shared by validation and JSON (de)serialization.
template <typename F>
void for_each_real(SimulatorConfig& c, F&& f) {
  f("r_floor", c.r_floor);
  f("speed_gain", c.speed_gain);
  f("speed_ref", c.speed_ref);
  f("speed_exp", c.speed_exp);
  f("under_gain", c.under_gain);
  f("under_exp", c.under_exp);
  f("over_gain", c.over_gain);
  f("over_exp", c.over_exp);
  f("e_star_base", c.e_star_base);
  f("e_star_slope", c.e_star_slope);
  f("noise_floor", c.noise_floor);
  f("noise_frac", c.noise_frac);
  f("sensor_noise", c.sensor_noise);
  f("line_period", c.line_period);
  f("sample_spacing", c.sample_spacing);
  f("modulus_base", c.modulus_base);
  f("modulus_slope1", c.modulus_slope1);
  f("modulus_knee", c.modulus_knee);
  f("modulus_slope2", c.modulus_slope2);
  f("modulus_floor", c.modulus_floor);
  f("modulus_noise", c.modulus_noise);
}

template <typename F>
void for_each_int(SimulatorConfig& c, F&& f) {
  f("layers", c.layers);
  f("samples_per_pass", c.samples_per_pass);
}

double gaussian(Rng& rng, double mean, double sd) {
  if (sd <= 0.0) return mean;
  std::normal_distribution<double> dist(mean, sd);
  return dist(rng);
}

}  // namespace

void SimulatorConfig::validate() const {
  auto positive = [](const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput(std::string(name) + " must be positive");
  };
  auto non_negative = [](const char* name, double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput(std::string(name) + " must be >= 0");
  };
  positive("r_floor", r_floor);
  positive("speed_gain", speed_gain);
  positive("speed_ref", speed_ref);
  positive("speed_exp", speed_exp);
  positive("under_gain", under_gain);
  positive("under_exp", under_exp);
  positive("over_gain", over_gain);
  positive("over_exp", over_exp);
  positive("e_star_base", e_star_base);
  non_negative("e_star_slope", e_star_slope);
  non_negative("noise_floor", noise_floor);
  non_negative("noise_frac", noise_frac);
  non_negative("sensor_noise", sensor_noise);
  positive("line_period", line_period);
  positive("sample_spacing", sample_spacing);
  if (layers < 1) throw InvalidInput("layers must be positive");
  if (samples_per_pass < 2) throw InvalidInput("samples_per_pass must be >= 2");
  positive("modulus_base", modulus_base);
  non_negative("modulus_slope1", modulus_slope1);
  positive("modulus_knee", modulus_knee);
  non_negative("modulus_slope2", modulus_slope2);
  positive("modulus_floor", modulus_floor);
  non_negative("modulus_noise", modulus_noise);
  if (!(modulus_floor < modulus_base)) throw InvalidInput("modulus_floor must be below modulus_base");
}

SimulatorConfig SimulatorConfig::noise_free() const {
  SimulatorConfig c = *this;
  c.noise_floor = 0.0;
  c.noise_frac = 0.0;
  c.sensor_noise = 0.0;
  c.modulus_noise = 0.0;
  return c;
}

SimulatorConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("<root>", "simulator config must be a JSON object");
  SimulatorConfig c;
  std::size_t known = 0;
  for_each_real(c, [&](const char* key, double& field) {
    if (!j.contains(key)) return;
    ++known;
    if (!j.at(key).is_number()) throw ValidationError(key, "expected a number");
    field = j.at(key).get<double>();
  });
  for_each_int(c, [&](const char* key, int& field) {
    if (!j.contains(key)) return;
    ++known;
    if (!j.at(key).is_number_integer()) throw ValidationError(key, "expected an integer");
    field = j.at(key).get<int>();
  });
  if (known != j.size()) {
    SimulatorConfig probe;
    for (const auto& [key, value] : j.items()) {
      bool found = false;
      for_each_real(probe, [&](const char* k, double&) { found = found || key == k; });
      for_each_int(probe, [&](const char* k, int&) { found = found || key == k; });
      if (!found) throw ValidationError(key, "unknown simulator config key");
    }
  }
  try {
    c.validate();
  } catch (const InvalidInput& e) {
    throw ValidationError("<config>", e.what());
  }
  return c;
}

nlohmann::json to_json(const SimulatorConfig& config) {
  SimulatorConfig c = config;
  nlohmann::json j = nlohmann::json::object();
  for_each_real(c, [&](const char* key, double& v) { j[key] = v; });
  for_each_int(c, [&](const char* key, int& v) { j[key] = v; });
  return j;
}

double optimal_extrusion(double vp, const SimulatorConfig& config) noexcept {
  return config.e_star_base - config.e_star_slope * (vp / 500.0);
}

double true_roughness(const PrintParameters& params, const SimulatorConfig& config) noexcept {
  const double e_star = optimal_extrusion(params.vp, config);
  const double under = std::max(0.0, e_star - params.em);
  const double over = std::max(0.0, params.em - e_star);
  return config.r_floor + config.speed_gain * std::pow(params.vp / config.speed_ref, config.speed_exp) +
         config.under_gain * std::pow(under, config.under_exp) +
         config.over_gain * std::pow(over, config.over_exp);
}

double measure_roughness(const PrintParameters& params, const SimulatorConfig& config, Rng& rng) {
  const double r = true_roughness(params, config);
  const double sd = std::max(config.noise_floor, config.noise_frac * r);
  return std::max(0.1, gaussian(rng, r, sd));
}

std::vector<double> layer_surface(double target_ra_um, const SimulatorConfig& config) {
  // Continuous-limit Ra of A sin(.) is 2A/pi.
  const double amplitude = 0.5 * std::numbers::pi * target_ra_um;
  const double spacing_mm = config.sample_spacing * 1e-3;
  std::vector<double> z(static_cast<std::size_t>(config.samples_per_pass));
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double x = static_cast<double>(i) * spacing_mm;
    z[i] = amplitude * std::sin(2.0 * std::numbers::pi * x / config.line_period);
  }
  return z;
}

ScanProfile scan_surface(std::span<const double> surface_um, int layer_index, const SimulatorConfig& config,
                         Rng& rng, bool reversed) {
  const double spacing_mm = config.sample_spacing * 1e-3;
  const std::size_t n = surface_um.size();
  std::vector<double> positions(n);
  std::vector<double> heights(n);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t i = reversed ? n - 1 - s : s;
    positions[s] = static_cast<double>(i) * spacing_mm;
    heights[s] = gaussian(rng, surface_um[i], config.sensor_noise);
  }
  return ScanProfile(layer_index, std::move(positions), std::move(heights));
}

PartScan synthesize_part_scan(const PrintParameters& params, const SimulatorConfig& config, Rng& rng) {
  std::vector<ScanProfile> layers;
  layers.reserve(static_cast<std::size_t>(config.layers));
  for (int k = 1; k <= config.layers; ++k) {
    const double target = measure_roughness(params, config, rng);
    const auto surface = layer_surface(target, config);
    layers.push_back(scan_surface(surface, k, config, rng));
  }
  return PartScan(std::move(layers));
}

double surrogate_modulus(double roughness_um, const SimulatorConfig& config, Rng& rng) {
  if (!(roughness_um > 0.0)) throw InvalidInput("roughness must be positive");
  const double knee = config.modulus_knee;
  const double e = config.modulus_base - config.modulus_slope1 * std::min(roughness_um, knee) -
                   config.modulus_slope2 * std::max(0.0, roughness_um - knee);
  return gaussian(rng, std::max(config.modulus_floor, e), config.modulus_noise);
}

MechanicalSummary summarize_mechanical(std::span<const Observation> trace, double lambda_um) {
  double sum_f = 0.0, sum_i = 0.0;
  std::size_t n_f = 0, n_i = 0;
  for (const auto& o : trace) {
    if (!o.modulus_gpa) continue;
    if (o.roughness_um <= lambda_um) {
      sum_f += *o.modulus_gpa;
      ++n_f;
    } else {
      sum_i += *o.modulus_gpa;
      ++n_i;
    }
  }
  MechanicalSummary s;
  if (n_f > 0) s.mean_modulus_feasible = sum_f / static_cast<double>(n_f);
  if (n_i > 0) s.mean_modulus_infeasible = sum_i / static_cast<double>(n_i);
  return s;
}

VirtualPrinter::VirtualPrinter(SimulatorConfig config, std::uint64_t seed)
    : config_(std::move(config)), rng_(derive_seed(seed, "simulator")) {
  config_.validate();
}

Evaluation VirtualPrinter::operator()(const PrintParameters& params) {
  const auto part = synthesize_part_scan(params, config_, rng_);
  const double r = global_roughness(part);
  return {r, surrogate_modulus(r, config_, rng_)};
}

}  // namespace fffopt::sim
