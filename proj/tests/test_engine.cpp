#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "phyloswarm/engine.hpp"

using namespace phyloswarm;

namespace {

Particle converged_particle(const BinaryPosition& x, std::vector<double> v) {
  Particle p;
  p.position = x;
  p.personal_best_position = x;
  p.velocity = VelocityVector(std::move(v));
  return p;
}

FunctionEvaluator constant_evaluator(std::size_t n, double b) {
  return FunctionEvaluator(n, [b](const BinaryPosition&) { return make_report(b, b); });
}

}  // namespace

TEST_CASE("sigmoid values") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(0.51) == doctest::Approx(1.0 / (1.0 + std::exp(-0.51))).epsilon(1e-14));
  CHECK(std::round(sigmoid(0.51) * 100.0) / 100.0 == doctest::Approx(0.62));
  CHECK(sigmoid(0.51) == doctest::Approx(0.6248).epsilon(1e-4));
  for (double v : {-30.0, -2.5, -0.1, 0.7, 4.0, 40.0}) {
    CHECK(sigmoid(v) + sigmoid(-v) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sigmoid(v) >= 0.0);
    CHECK(sigmoid(v) <= 1.0);
  }
  CHECK(sigmoid(1.0) > sigmoid(0.5));
  CHECK_THROWS_AS(sigmoid(std::nan("")), std::domain_error);
}

TEST_CASE("inertia decays linearly") {
  EngineConfig cfg;
  CHECK(inertia_weight(cfg, 0) == doctest::Approx(0.9));
  CHECK(inertia_weight(cfg, 100) == doctest::Approx(0.4));
  CHECK(inertia_weight(cfg, 50) == doctest::Approx(0.65));
  for (std::size_t i = 1; i <= 100; ++i) {
    CHECK(inertia_weight(cfg, i - 1) - inertia_weight(cfg, i) == doctest::Approx(0.005).epsilon(1e-9));
  }
  CHECK_THROWS_AS(inertia_weight(cfg, 101), std::out_of_range);
}

TEST_CASE("constriction factor") {
  const double c = 4.1;
  const double expected = 2.0 / std::abs(2.0 - c - std::sqrt(c * (c - 4.0)));
  CHECK(constriction(2.05, 2.05, 1.0) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(constriction(2.05, 2.05, 1.0) == doctest::Approx(0.7298).epsilon(1e-4));
  CHECK(constriction(2.05, 2.05, 0.0) == 0.0);
  CHECK(constriction(2.0, 2.0, 0.5) == doctest::Approx(0.5));
  CHECK_THROWS_AS(constriction(1.9, 2.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(constriction(2.05, 2.05, 1.5), std::domain_error);
  // x(k) = k x(1), so x < 1 exactly when k < 1/x(1) ~ 1.37.
  CHECK(1.36 * constriction(2.05, 2.05, 1.0) < 1.0);
  CHECK(1.38 * constriction(2.05, 2.05, 1.0) > 1.0);
}

TEST_CASE("velocity II keeps only the inertia term at convergence") {
  EngineConfig cfg;
  const auto x = BinaryPosition::from_string("1011");
  const auto p = converged_particle(x, {0.2, -0.4, 1.0, 0.0});
  RngStream rng(5);
  const auto v = velocity_update_v2(p, x, 0.7, rng, cfg);
  for (std::size_t j = 0; j < 4; ++j) CHECK(v[j] == doctest::Approx(0.7 * p.velocity[j]));
}

TEST_CASE("velocity II pulls towards both bests") {
  EngineConfig cfg;
  cfg.r_accel_range = {0.3, 0.3};
  Particle p = converged_particle(BinaryPosition::from_string("0"), {0.0});
  p.personal_best_position = BinaryPosition::from_string("1");
  RngStream rng(1);
  const auto v = velocity_update_v2(p, BinaryPosition::from_string("1"), 0.9, rng, cfg);
  CHECK(v[0] == doctest::Approx(0.6));
}

TEST_CASE("velocity II matches a direct evaluation of the rule") {
  EngineConfig cfg;
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + gen() % 20;
    Particle p;
    p.position = oracle::random_word(n, gen);
    p.personal_best_position = oracle::random_word(n, gen);
    const auto g = oracle::random_word(n, gen);
    std::vector<double> v0(n);
    for (auto& v : v0) v = std::uniform_real_distribution<double>(-2, 2)(gen);
    p.velocity = VelocityVector(v0);
    RngStream rng(trial), mirror(trial);
    const double r1 = mirror.uniform(0.1, 0.5), r2 = mirror.uniform(0.1, 0.5);
    const auto v = velocity_update_v2(p, g, 0.8, rng, cfg);
    for (std::size_t j = 0; j < n; ++j) {
      const double expected = 0.8 * v0[j] + r1 * (p.personal_best_position.test(j) - p.position.test(j)) +
                              r2 * (g.test(j) - p.position.test(j));
      CHECK(v[j] == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("velocity I scales by the constriction factor") {
  EngineConfig cfg;
  cfg.variant = Variant::VersionI;
  const auto x = BinaryPosition::from_string("110");
  const auto p = converged_particle(x, {0.5, -1.0, 2.0});
  RngStream rng(9), mirror(9);
  const double k = mirror.uniform01();
  const double chi = constriction(2.05, 2.05, k);
  const auto v = velocity_update_v1(p, x, rng, cfg);
  for (std::size_t j = 0; j < 3; ++j) CHECK(v[j] == doctest::Approx(chi * p.velocity[j]));
  CHECK(v.norm() == doctest::Approx(chi * p.velocity.norm()));
  CHECK(v.norm() < p.velocity.norm());

  Particle q = converged_particle(BinaryPosition::from_string("0"), {0.0});
  q.personal_best_position = BinaryPosition::from_string("1");
  RngStream rng2(10), mirror2(10);
  const double k2 = mirror2.uniform01();
  const auto v2 = velocity_update_v1(q, BinaryPosition::from_string("1"), rng2, cfg);
  CHECK(v2[0] == doctest::Approx(constriction(2.05, 2.05, k2) * 4.1));
  CHECK(constriction(2.05, 2.05, 1.0) * 4.1 == doctest::Approx(2.992).epsilon(1e-3));
}

TEST_CASE("velocity clamp applies when configured") {
  EngineConfig cfg;
  cfg.velocity_clamp = Interval{-0.1, 0.1};
  const auto x = BinaryPosition::from_string("1");
  const auto p = converged_particle(x, {5.0});
  RngStream rng(1);
  CHECK(velocity_update_v2(p, x, 0.9, rng, cfg)[0] == 0.1);
}

TEST_CASE("position update thresholds") {
  EngineConfig cfg;
  cfg.r_threshold_range = {0.83, 0.83};
  RngStream rng(1);
  CHECK_FALSE(position_update(VelocityVector(std::vector<double>{0.51}), rng, cfg).test(0));
  cfg.r_threshold_range = {0.1, 0.5};
  CHECK(position_update(VelocityVector(std::vector<double>{50.0}), rng, cfg).test(0));
  std::size_t ones = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ones += position_update(VelocityVector(1, 0.0), rng, cfg).test(0);
  CHECK(static_cast<double>(ones) / draws >= 0.999);
}

TEST_CASE("position update matches its Bernoulli probability") {
  RngStream rng(77);
  for (Interval range : {Interval{0.0, 1.0}, Interval{0.1, 0.5}}) {
    EngineConfig cfg;
    cfg.r_threshold_range = range;
    for (double v : {-1.5, -0.5, 0.0, 0.3, 1.2}) {
      const double expected = std::clamp((sigmoid(v) - range.lo) / range.width(), 0.0, 1.0);
      const int draws = 100000;
      std::size_t ones = 0;
      for (int i = 0; i < draws; ++i) ones += position_update(VelocityVector(1, v), rng, cfg).test(0);
      CHECK(std::abs(static_cast<double>(ones) / draws - expected) <= 0.01);
    }
  }
}

TEST_CASE("initialization") {
  EngineConfig cfg;
  cfg.init_ones_fraction_range = {1.0, 1.0};
  SwarmRng rng(3, cfg.particles);
  auto state = initialize_swarm(12, cfg, rng);
  for (const auto& p : state.particles) CHECK(p.position == BinaryPosition::all_ones(12));

  EngineConfig dflt;
  SwarmRng a(4, dflt.particles), b(4, dflt.particles);
  const auto s1 = initialize_swarm(82, dflt, a);
  const auto s2 = initialize_swarm(82, dflt, b);
  REQUIRE(s1.particles.size() == 10);
  for (std::size_t i = 0; i < s1.particles.size(); ++i) {
    const auto& p = s1.particles[i];
    CHECK(p.id == i);
    CHECK(p.position.ones_count() >= 70);
    CHECK(p.personal_best_position == p.position);
    for (double v : p.velocity.values()) {
      CHECK(v >= 0.0);
      CHECK(v < 1.0);
    }
    CHECK(p.position == s2.particles[i].position);
    CHECK(p.velocity == s2.particles[i].velocity);
  }
  CHECK(s1.iteration == 0);
  CHECK_FALSE(s1.evaluated);
  SwarmRng wrong(4, 3);
  CHECK_THROWS(initialize_swarm(82, dflt, wrong));
  CHECK_THROWS(initialize_swarm(0, dflt, a));
}

TEST_CASE("termination") {
  EngineConfig cfg;
  SwarmState state;
  state.global_best_report = make_report(95, 95);
  CHECK(should_terminate(state, cfg));
  state.global_best_report = make_report(94.8, 95);
  state.iteration = 10;
  CHECK_FALSE(should_terminate(state, cfg));
  state.iteration = cfg.max_iterations;
  CHECK(should_terminate(state, cfg));
}

TEST_CASE("configuration checks") {
  auto bad = [](auto mutate) {
    EngineConfig cfg;
    mutate(cfg);
    return cfg;
  };
  CHECK_THROWS(bad([](EngineConfig& c) { c.particles = 0; }).validate());
  CHECK_THROWS(bad([](EngineConfig& c) { c.max_iterations = 0; }).validate());
  CHECK_THROWS(bad([](EngineConfig& c) { c.w_min = 1.0; }).validate());
  CHECK_THROWS(bad([](EngineConfig& c) { c.r_threshold_range = {0.6, 0.5}; }).validate());
  CHECK_THROWS(bad([](EngineConfig& c) { c.r_accel_range = {0.0, 1.5}; }).validate());
  CHECK_THROWS(bad([](EngineConfig& c) {
                 c.variant = Variant::VersionI;
                 c.C1 = 1.0;
               }).validate());
  CHECK_NOTHROW(EngineConfig{}.validate());
}

TEST_CASE("a flat landscape keeps the first particle as global best") {
  EngineConfig cfg;
  cfg.max_iterations = 30;
  const auto ev = constant_evaluator(15, 50.0);
  SwarmRng rng(6, cfg.particles);
  auto state = initialize_swarm(15, cfg, rng);
  std::vector<FitnessReport> reports(cfg.particles, ev.evaluate(BinaryPosition(15)));
  state = evaluate_initial(std::move(state), reports);
  const auto initial_best = state.global_best_position;
  CHECK(initial_best == state.particles[0].position);
  for (int i = 0; i < 30; ++i) {
    state = step(state, ev, cfg, rng);
    CHECK(state.global_best_position == initial_best);
    CHECK(state.global_best_report.fitness == 50.0);
  }
}

TEST_CASE("global best never decreases and equals the best personal best") {
  for (Variant variant : {Variant::VersionI, Variant::VersionII}) {
    EngineConfig cfg;
    cfg.variant = variant;
    cfg.target_fitness = 101;
    cfg.max_iterations = 60;
    cfg.seed = 12;
    auto planted = BinaryPosition::all_ones(20);
    for (std::size_t j : {1u, 4u, 9u, 15u}) planted.set(j, false);
    PlantedOracle ev(planted, 3.0, 2);
    SwarmRng rng(cfg.seed, cfg.particles);
    auto state = initialize_swarm(20, cfg, rng);
    std::vector<FitnessReport> reports;
    for (const auto& p : state.particles) reports.push_back(ev.evaluate(p.position));
    state = evaluate_initial(std::move(state), reports);
    double previous = state.global_best_report.fitness;
    for (int i = 0; i < 60; ++i) {
      state = step(state, ev, cfg, rng);
      CHECK(state.global_best_report.fitness >= previous);
      previous = state.global_best_report.fitness;
      double best_personal = -1.0;
      for (const auto& p : state.particles) {
        CHECK(p.personal_best_report == ev.evaluate(p.personal_best_position));
        best_personal = std::max(best_personal, p.personal_best_report.fitness);
      }
      CHECK(state.global_best_report.fitness == best_personal);
      CHECK(ev.evaluate(state.global_best_position) == state.global_best_report);
    }
  }
}

TEST_CASE("steps replay exactly from the same seed") {
  EngineConfig cfg;
  cfg.target_fitness = 101;
  PlantedOracle ev(BinaryPosition::from_string("1101101110110111"), 2.0, 5);
  auto run = [&] {
    SwarmRng rng(99, cfg.particles);
    auto state = initialize_swarm(16, cfg, rng);
    std::vector<FitnessReport> reports;
    for (const auto& p : state.particles) reports.push_back(ev.evaluate(p.position));
    state = evaluate_initial(std::move(state), reports);
    std::vector<BinaryPosition> path;
    for (int i = 0; i < 50; ++i) {
      state = step(state, ev, cfg, rng);
      for (const auto& p : state.particles) path.push_back(p.position);
    }
    return path;
  };
  CHECK(run() == run());
}

TEST_CASE("runs are independent of evaluation order") {
  EngineConfig cfg;
  cfg.target_fitness = 101;
  cfg.max_iterations = 40;
  PlantedOracle ev(BinaryPosition::from_string("0111011110111101"), 2.0, 1);
  const auto forward = run_swarm(16, cfg, ev);
  BatchEvaluator reversed = [&](std::size_t, std::span<const BinaryPosition> words) {
    std::vector<FitnessReport> out(words.size());
    for (std::size_t i = words.size(); i-- > 0;) out[i] = ev.evaluate(words[i]);
    return out;
  };
  const auto backward = run_swarm(16, cfg, reversed);
  CHECK(forward.trace == backward.trace);
  CHECK(forward.trace.size() == 41);
}

TEST_CASE("run stops at the target") {
  EngineConfig cfg;
  PlantedOracle ev(BinaryPosition::all_ones(10));
  const auto run = run_swarm(10, cfg, ev);
  CHECK(run.final_state.global_best_report.fitness >= 95.0);
  CHECK(run.trace.back().iteration == run.final_state.iteration);
  CHECK(run.trace.front().iteration == 0);
}
