#include <doctest.h>

#include <cmath>

#include "fffopt/error.hpp"
#include "fffopt/simulator.hpp"

using namespace fffopt;
using namespace fffopt::sim;

TEST_CASE("true_roughness closed form") {
  const SimulatorConfig c;
  CHECK(optimal_extrusion(35, c) == doctest::Approx(0.9451));
  CHECK(true_roughness({35, optimal_extrusion(35, c)}, c) == doctest::Approx(4.789).epsilon(1e-3));
  CHECK(true_roughness({350, 1.5}, c) == doctest::Approx(122.2).epsilon(1e-3));
  for (double vp : {10.0, 64.4, 103.5, 250.0, 500.0}) {
    const double baseline = c.r_floor + c.speed_gain * std::pow(vp / c.speed_ref, c.speed_exp);
    CHECK(true_roughness({vp, optimal_extrusion(vp, c)}, c) == doctest::Approx(baseline));
  }
}

TEST_CASE("true_roughness shape") {
  const SimulatorConfig c;
  SUBCASE("unique minimizer at the optimal extrusion, over-extrusion steeper") {
    for (double vp : {35.0, 100.0, 350.0}) {
      const double e_star = optimal_extrusion(vp, c);
      double best = 1e300, best_em = 0;
      for (int i = 0; i <= 10000; ++i) {
        const double em = 0.5 + i * 1e-4;
        const double r = true_roughness({vp, em}, c);
        if (r < best) {
          best = r;
          best_em = em;
        }
      }
      CHECK(std::abs(best_em - e_star) <= 1e-4);
      const double r0 = true_roughness({vp, e_star}, c);
      for (double d : {0.1, 0.2, 0.3}) {
        CHECK(true_roughness({vp, e_star + d}, c) - r0 > true_roughness({vp, e_star - d}, c) - r0);
        CHECK(true_roughness({vp, e_star + d}, c) > r0);
        CHECK(true_roughness({vp, e_star - d}, c) > r0);
      }
    }
  }
  SUBCASE("baseline increases with speed") {
    double prev = 0;
    for (int vp = 10; vp <= 500; ++vp) {
      const double r = true_roughness({double(vp), optimal_extrusion(vp, c)}, c);
      CHECK(r > prev);
      prev = r;
    }
  }
  SUBCASE("feasible speed ceiling") {
    double top = -1;
    for (int i = 0; i <= 490; ++i)
      for (int j = 0; j <= 1000; ++j) {
        const PrintParameters p{10.0 + i, 0.5 + j * 1e-3};
        if (true_roughness(p, c) <= 10.0) top = std::max(top, p.vp);
      }
    CHECK(top >= 100.0);
    CHECK(top <= 160.0);
  }
}

TEST_CASE("measure_roughness") {
  SimulatorConfig c;
  const PrintParameters p{120, 0.9};
  SUBCASE("noise off is the ground truth") {
    auto quiet = c;
    quiet.noise_floor = quiet.noise_frac = 0.0;
    Rng rng(1);
    CHECK(measure_roughness(p, quiet, rng) == true_roughness(p, quiet));
  }
  SUBCASE("replayable") {
    Rng a(77), b(77);
    CHECK(measure_roughness(p, c, a) == measure_roughness(p, c, b));
  }
  SUBCASE("noise level") {
    for (const PrintParameters q : {PrintParameters{20, 0.95}, PrintParameters{350, 1.5}}) {
      Rng rng(5);
      const double truth = true_roughness(q, c);
      const double expected = std::max(c.noise_floor, c.noise_frac * truth);
      double s = 0, ss = 0;
      const int n = 10000;
      for (int i = 0; i < n; ++i) {
        const double v = measure_roughness(q, c, rng);
        s += v;
        ss += v * v;
      }
      const double mean = s / n;
      const double sd = std::sqrt(ss / n - mean * mean);
      CHECK(std::abs(sd - expected) / expected < 0.1);
    }
  }
}

TEST_CASE("synthesize_part_scan") {
  const SimulatorConfig c;
  SUBCASE("noise free layers hit their target Ra") {
    const auto quiet = c.noise_free();
    Rng rng(3);
    const PrintParameters p{64.4, 1.05};
    const auto part = synthesize_part_scan(p, quiet, rng);
    CHECK(part.layer_count() == 40);
    const double target = true_roughness(p, quiet);
    for (const auto& layer : part.profiles()) CHECK(std::abs(compute_ra(layer) - target) / target < 0.01);
    CHECK(std::abs(global_roughness(part) - target) / target < 0.01);
  }
  SUBCASE("global roughness tracks ground truth at default noise") {
    for (const PrintParameters p : {PrintParameters{35, 0.95}, PrintParameters{103.5, 0.9}, PrintParameters{350, 1.3}}) {
      Rng rng(11);
      const auto part = synthesize_part_scan(p, c, rng);
      CHECK(part.layer_count() == static_cast<std::size_t>(c.layers));
      const double truth = true_roughness(p, c);
      CHECK(std::abs(global_roughness(part) - truth) / truth < 0.03);
    }
  }
  SUBCASE("pass geometry") {
    Rng rng(1);
    const auto part = synthesize_part_scan({50, 0.9}, c, rng);
    const auto& layer = part.profiles().front();
    CHECK(layer.size() == 576);
    CHECK(layer.positions()[1] - layer.positions()[0] == doctest::Approx(8.33e-3));
  }
}

TEST_CASE("surrogate_modulus") {
  const auto quiet = SimulatorConfig{}.noise_free();
  Rng rng(1);
  CHECK(surrogate_modulus(8.0, quiet, rng) == doctest::Approx(20.58));
  CHECK(surrogate_modulus(200.0, quiet, rng) == doctest::Approx(8.0));
  CHECK(surrogate_modulus(30.0, quiet, rng) == doctest::Approx(20.9 - 0.8 - 1.8));
  double prev = 1e9;
  for (int i = 1; i <= 2000; ++i) {
    const double e = surrogate_modulus(0.1 * i, quiet, rng);
    CHECK(e <= prev);
    prev = e;
  }
  CHECK_THROWS_AS(surrogate_modulus(0.0, quiet, rng), InvalidInput);
}

TEST_CASE("summarize_mechanical") {
  auto obs = [](double r, std::optional<double> e) {
    Observation o;
    o.roughness_um = r;
    o.feasible = r <= 10.0;
    o.modulus_gpa = e;
    return o;
  };
  const std::vector<Observation> mixed{obs(8, 20.6), obs(9, 20.4), obs(12, 19.9), obs(15, std::nullopt)};
  const auto s = summarize_mechanical(mixed, 10.0);
  CHECK(*s.mean_modulus_feasible == doctest::Approx(20.5));
  CHECK(*s.mean_modulus_infeasible == doctest::Approx(19.9));
  CHECK(*s.mean_modulus_feasible > *s.mean_modulus_infeasible);

  const std::vector<Observation> ok{obs(8, 20.6), obs(10, 20.5)};
  const auto a = summarize_mechanical(ok, 10.0);
  CHECK(a.mean_modulus_feasible.has_value());
  CHECK_FALSE(a.mean_modulus_infeasible.has_value());
}

TEST_CASE("simulator config JSON") {
  SimulatorConfig c;
  c.over_gain = 300.0;
  c.layers = 12;
  const auto j = to_json(c);
  CHECK(j.size() == 23);
  CHECK(j.at("over_gain") == 300.0);
  CHECK(j.at("samples_per_pass") == 576);
  CHECK(config_from_json(j) == c);

  CHECK(config_from_json(nlohmann::json{{"noise_frac", 0.0}}).noise_frac == 0.0);
  CHECK(config_from_json(nlohmann::json::object()) == SimulatorConfig{});
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"overgain", 1.0}}), ValidationError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"layers", 2.5}}), ValidationError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"speed_exp", -1.0}}), ValidationError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"modulus_floor", 25.0}}), ValidationError);
}
