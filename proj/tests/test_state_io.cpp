#include <doctest.h>

#include <cstdio>
#include <random>

#include "fffopt/error.hpp"
#include "fffopt/random.hpp"
#include "fffopt/state_io.hpp"

using namespace fffopt;
using nlohmann::json;

namespace {

OptimizerState sample_state(std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  OptimizerState s;
  s.seed = rng();
  s.lambda_um = 1.0 + 30.0 * u(rng);
  s.pi = u(rng);
  s.grid_resolution = 2 + int(200 * u(rng));
  s.epsilon_speed = 0.1 + 20 * u(rng);
  const int n = int(u(rng) * 12);
  for (int i = 0; i < n; ++i) {
    Observation o;
    o.params = {10 + 490 * u(rng), 0.5 + u(rng)};
    o.roughness_um = 0.1 + 60 * u(rng);
    o.feasible = o.roughness_um <= s.lambda_um;
    o.iteration = i < 3 ? 0 : i - 2;
    if (o.iteration > 0) o.phase_pi = u(rng);
    if (u(rng) < 0.5) o.modulus_gpa = 8 + 13 * u(rng);
    s.observations.push_back(o);
  }
  if (u(rng) < 0.5) s.hyper_cache = gp::Hyperparameters{{u(rng) + 0.05, u(rng) + 0.05}, 1 + u(rng), 1e-3 + u(rng)};
  return s;
}

std::string field_of(const json& j) {
  try {
    state_from_json(j);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("state JSON round trip") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = sample_state(seed);
    const auto j = state_to_json(s);
    const auto back = state_from_json(j);
    CHECK(back == s);
    CHECK(state_to_json(back).dump() == j.dump());
    CHECK(state_from_json(json::parse(j.dump())) == s);
  }
}

TEST_CASE("state JSON layout") {
  OptimizerState s;
  Observation o;
  o.params = {350, 0.7};
  o.roughness_um = 40;
  s.observations.push_back(o);
  const auto j = state_to_json(s);
  CHECK(j.at("bounds").at("vp_max") == 500.0);
  CHECK(j.at("lambda_um") == 10.0);
  CHECK(j.at("grid_resolution") == 101);
  CHECK(j.at("observations")[0].at("phase_pi").is_null());
  CHECK_FALSE(j.at("observations")[0].contains("modulus_gpa"));
  CHECK_FALSE(j.contains("hyper"));
}

TEST_CASE("state validation names the field") {
  auto base = state_to_json(sample_state(3));
  base["observations"] = json::array({json{{"vp", 100.0}, {"em", 1.0}, {"roughness_um", 5.0},
                                           {"iteration", 1}, {"phase_pi", 0.4}}});
  REQUIRE(field_of(base).empty());

  auto with = [&](auto edit) {
    json j = base;
    edit(j);
    return field_of(j);
  };
  CHECK(with([](json& j) { j.erase("lambda_um"); }) == "lambda_um");
  CHECK(with([](json& j) { j["lambda_um"] = -1.0; }) == "lambda_um");
  CHECK(with([](json& j) { j["pi"] = 1.5; }) == "pi");
  CHECK(with([](json& j) { j["grid_resolution"] = 1; }) == "grid_resolution");
  CHECK(with([](json& j) { j["grid_resolution"] = 10.5; }) == "grid_resolution");
  CHECK(with([](json& j) { j["seed"] = -4; }) == "seed");
  CHECK(with([](json& j) { j["bounds"]["vp_min"] = 600.0; }) == "bounds");
  CHECK(with([](json& j) { j["bounds"].erase("em_max"); }) == "bounds.em_max");
  CHECK(with([](json& j) { j["observations"][0]["roughness_um"] = 0.0; }) == "observations[0].roughness_um");
  CHECK(with([](json& j) { j["observations"][0]["roughness_um"] = "7"; }) == "observations[0].roughness_um");
  CHECK(with([](json& j) { j["observations"][0]["vp"] = 700.0; }) == "observations[0].vp");
  CHECK(with([](json& j) { j["observations"][0].erase("phase_pi"); }) == "observations[0].phase_pi");
  CHECK(with([](json& j) { j["hyper"] = {{"l_vp", 0.0}, {"l_em", 1.0}, {"signal_var", 1.0}, {"noise_var", 0.1}}; }) ==
        "hyper");
  CHECK(with([](json& j) { j = json::array(); }) == "<root>");
}

TEST_CASE("feasibility comes from lambda, not the file") {
  auto j = state_to_json(sample_state(1));
  j["lambda_um"] = 10.0;
  j["observations"] = json::array({json{{"vp", 100.0}, {"em", 1.0}, {"roughness_um", 10.0},
                                        {"iteration", 0}, {"phase_pi", nullptr}, {"feasible", false}}});
  CHECK(state_from_json(j).observations[0].feasible);
}

TEST_CASE("session hash") {
  Session sess{sample_state(8), PrintParameters{120.0, 0.9}};
  const auto text = serialize_session(sess);
  CHECK(text.back() == '\n');
  CHECK(parse_session(text) == sess);
  CHECK(serialize_session(parse_session(text)) == text);

  auto doc = json::parse(text);
  const std::string hash = doc.at("state_hash");
  CHECK(hash.size() == 16);
  doc.erase("state_hash");
  CHECK(content_hash(doc) == hash);

  auto tampered = json::parse(text);
  tampered["lambda_um"] = 11.0;
  CHECK_THROWS_AS(parse_session(tampered.dump()), ValidationError);

  // Without a hash the document is accepted as is.
  CHECK(parse_session(doc.dump()).state == sess.state);

  auto outside = doc;
  outside["pending"] = {{"vp", 900.0}, {"em", 1.0}};
  CHECK_THROWS_AS(parse_session(outside.dump()), ValidationError);
  CHECK_THROWS_AS(parse_session("{not json"), ValidationError);
}

TEST_CASE("content_hash is FNV-1a of the compact dump") {
  // FNV-1a 64 of "{}".
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : std::string("{}")) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  CHECK(content_hash(json::object()) == buf);
}
