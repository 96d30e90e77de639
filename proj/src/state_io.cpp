#include "fffopt/state_io.hpp"

#include <cmath>
#include <cstdio>

#include "fffopt/error.hpp"

namespace fffopt {

using nlohmann::json;

namespace {

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(path + key, "missing");
  return j.at(key);
}

double number(const json& j, const std::string& key, const std::string& path = "") {
  const json& v = require(j, key, path);
  if (!v.is_number()) throw ValidationError(path + key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ValidationError(path + key, "not finite");
  return d;
}

long long integer(const json& j, const std::string& key, const std::string& path = "") {
  const json& v = require(j, key, path);
  if (!v.is_number_integer()) throw ValidationError(path + key, "expected an integer");
  return v.get<long long>();
}

std::optional<double> optional_number(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return number(j, key, path);
}

json params_json(const PrintParameters& p) { return {{"vp", p.vp}, {"em", p.em}}; }

PrintParameters params_from(const json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path.substr(0, path.size() - 1), "expected an object");
  return {number(j, "vp", path), number(j, "em", path)};
}

}  // namespace

json state_to_json(const OptimizerState& s) {
  json j;
  j["bounds"] = {{"vp_min", s.bounds.vp_min},
                 {"vp_max", s.bounds.vp_max},
                 {"em_min", s.bounds.em_min},
                 {"em_max", s.bounds.em_max}};
  j["lambda_um"] = s.lambda_um;
  j["pi"] = s.pi;
  j["grid_resolution"] = s.grid_resolution;
  j["epsilon_speed"] = s.epsilon_speed;
  j["seed"] = s.seed;
  json obs = json::array();
  for (const auto& o : s.observations) {
    json row{{"vp", o.params.vp},
             {"em", o.params.em},
             {"roughness_um", o.roughness_um},
             {"iteration", o.iteration},
             {"phase_pi", o.phase_pi ? json(*o.phase_pi) : json(nullptr)}};
    if (o.modulus_gpa) row["modulus_gpa"] = *o.modulus_gpa;
    obs.push_back(std::move(row));
  }
  j["observations"] = std::move(obs);
  if (s.hyper_cache) {
    const auto& h = *s.hyper_cache;
    j["hyper"] = {{"l_vp", h.length_scales[0]},
                  {"l_em", h.length_scales[1]},
                  {"signal_var", h.signal_variance},
                  {"noise_var", h.noise_variance}};
  }
  return j;
}

OptimizerState state_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("<root>", "expected a JSON object");
  OptimizerState s;

  const json& b = require(j, "bounds", "");
  if (!b.is_object()) throw ValidationError("bounds", "expected an object");
  s.bounds = {number(b, "vp_min", "bounds."), number(b, "vp_max", "bounds."), number(b, "em_min", "bounds."),
              number(b, "em_max", "bounds.")};
  try {
    s.bounds.validate();
  } catch (const InvalidInput& e) {
    throw ValidationError("bounds", e.what());
  }

  s.lambda_um = number(j, "lambda_um");
  if (!(s.lambda_um > 0.0)) throw ValidationError("lambda_um", "must be positive");
  s.pi = number(j, "pi");
  if (!(s.pi >= 0.0 && s.pi <= 1.0)) throw ValidationError("pi", "must lie in [0, 1]");
  const long long res = integer(j, "grid_resolution");
  if (res < 2 || res > 100000) throw ValidationError("grid_resolution", "must be in [2, 100000]");
  s.grid_resolution = static_cast<int>(res);
  s.epsilon_speed = number(j, "epsilon_speed");
  if (!(s.epsilon_speed > 0.0)) throw ValidationError("epsilon_speed", "must be positive");
  const json& seed = require(j, "seed", "");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0))
    throw ValidationError("seed", "expected a non-negative integer");
  s.seed = seed.get<std::uint64_t>();

  const json& obs = require(j, "observations", "");
  if (!obs.is_array()) throw ValidationError("observations", "expected an array");
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const std::string path = "observations[" + std::to_string(i) + "].";
    const json& row = obs[i];
    if (!row.is_object()) throw ValidationError(path.substr(0, path.size() - 1), "expected an object");
    Observation o;
    o.params = {number(row, "vp", path), number(row, "em", path)};
    if (!s.bounds.contains(o.params)) throw ValidationError(path + "vp", "parameters outside bounds");
    o.roughness_um = number(row, "roughness_um", path);
    if (!(o.roughness_um > 0.0)) throw ValidationError(path + "roughness_um", "must be positive");
    o.feasible = o.roughness_um <= s.lambda_um;
    o.modulus_gpa = optional_number(row, "modulus_gpa", path);
    const long long it = integer(row, "iteration", path);
    if (it < 0) throw ValidationError(path + "iteration", "must be >= 0");
    o.iteration = static_cast<int>(it);
    if (!row.contains("phase_pi")) throw ValidationError(path + "phase_pi", "missing");
    o.phase_pi = optional_number(row, "phase_pi", path);
    if (o.phase_pi && !(*o.phase_pi >= 0.0 && *o.phase_pi <= 1.0))
      throw ValidationError(path + "phase_pi", "must lie in [0, 1]");
    s.observations.push_back(o);
  }

  if (j.contains("hyper") && !j.at("hyper").is_null()) {
    const json& h = j.at("hyper");
    if (!h.is_object()) throw ValidationError("hyper", "expected an object");
    gp::Hyperparameters hp{{number(h, "l_vp", "hyper."), number(h, "l_em", "hyper.")},
                           number(h, "signal_var", "hyper."),
                           number(h, "noise_var", "hyper.")};
    try {
      gp::validate(hp);
    } catch (const InvalidInput& e) {
      throw ValidationError("hyper", e.what());
    }
    s.hyper_cache = hp;
  }
  return s;
}

std::string content_hash(const json& document_without_hash) {
  const std::string text = document_without_hash.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string serialize_session(const Session& session) {
  json j = state_to_json(session.state);
  if (session.pending) j["pending"] = params_json(*session.pending);
  j["state_hash"] = content_hash(j);
  return j.dump(2) + "\n";
}

Session parse_session(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("<root>", std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("<root>", "expected a JSON object");
  if (j.contains("state_hash")) {
    if (!j.at("state_hash").is_string()) throw ValidationError("state_hash", "expected a string");
    const std::string stored = j.at("state_hash").get<std::string>();
    json body = j;
    body.erase("state_hash");
    if (content_hash(body) != stored) throw ValidationError("state_hash", "does not match file content");
  }
  Session s;
  s.state = state_from_json(j);
  if (j.contains("pending") && !j.at("pending").is_null()) {
    s.pending = params_from(j.at("pending"), "pending.");
    if (!s.state.bounds.contains(*s.pending)) throw ValidationError("pending", "parameters outside bounds");
  }
  return s;
}

}  // namespace fffopt
