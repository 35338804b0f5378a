#include "phyloswarm/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace phyloswarm {

namespace {

void require(bool condition, const char* message) {
  if (!condition) throw std::invalid_argument(message);
}

bool is_unit_subrange(const Interval& r) { return r.lo <= r.hi && r.lo >= 0.0 && r.hi <= 1.0; }

double clamp_velocity(double v, const EngineConfig& cfg) {
  if (!cfg.velocity_clamp) return v;
  return std::clamp(v, cfg.velocity_clamp->lo, cfg.velocity_clamp->hi);
}

double difference(const BinaryPosition& target, const BinaryPosition& x, std::size_t j) {
  return static_cast<double>(target.test(j)) - static_cast<double>(x.test(j));
}

void check_dimensions(const Particle& p, const BinaryPosition& global_best) {
  const std::size_t n = p.position.size();
  if (p.velocity.size() != n || p.personal_best_position.size() != n || global_best.size() != n) {
    throw std::invalid_argument("velocity update: dimension mismatch");
  }
}

}  // namespace

std::string_view to_string(Variant variant) noexcept {
  return variant == Variant::VersionI ? "bpso1" : "bpso2";
}

Variant parse_variant(std::string_view text) {
  if (text == "bpso1" || text == "VersionI") return Variant::VersionI;
  if (text == "bpso2" || text == "VersionII") return Variant::VersionII;
  throw std::invalid_argument("unknown BPSO variant '" + std::string(text) + "'");
}

void EngineConfig::validate() const {
  require(particles > 0, "engine: L must be positive");
  require(max_iterations > 0, "engine: I_max must be positive");
  require(w_min <= w_max, "engine: w_min must not exceed w_max");
  require(is_unit_subrange(r_accel_range), "engine: r_accel_range must be an ordered subrange of [0,1]");
  require(is_unit_subrange(r_threshold_range),
          "engine: r_threshold_range must be an ordered subrange of [0,1]");
  require(is_unit_subrange(init_ones_fraction_range),
          "engine: init_ones_fraction_range must be an ordered subrange of [0,1]");
  require(!velocity_clamp || velocity_clamp->lo <= velocity_clamp->hi,
          "engine: velocity_clamp bounds out of order");
  require(std::isfinite(c1) && std::isfinite(c2) && std::isfinite(C1) && std::isfinite(C2),
          "engine: acceleration coefficients must be finite");
  require(variant != Variant::VersionI || C1 + C2 >= 4.0, "engine: Version I needs C1 + C2 >= 4");
}

SwarmRng::SwarmRng(std::uint64_t seed, std::size_t particles) {
  const RngStream root(seed);
  streams_.reserve(particles);
  for (std::size_t i = 0; i < particles; ++i) streams_.push_back(root.split(i));
}

double sigmoid(double v) {
  if (!std::isfinite(v)) throw std::domain_error("sigmoid: non-finite input");
  return 1.0 / (1.0 + std::exp(-v));
}

double inertia_weight(const EngineConfig& cfg, std::size_t iteration) {
  if (iteration > cfg.max_iterations) throw std::out_of_range("inertia_weight: iteration beyond I_max");
  return cfg.w_max - ((cfg.w_max - cfg.w_min) / static_cast<double>(cfg.max_iterations)) *
                         static_cast<double>(iteration);
}

double constriction(double C1, double C2, double k) {
  const double c = C1 + C2;
  if (!(c >= 4.0)) throw std::domain_error("constriction: C1 + C2 must be at least 4");
  if (!(k >= 0.0 && k <= 1.0)) throw std::domain_error("constriction: k outside [0,1]");
  return 2.0 * k / std::abs(2.0 - c - std::sqrt(c * (c - 4.0)));
}

VelocityVector velocity_update_v2(const Particle& p, const BinaryPosition& global_best, double w,
                                  RngStream& rng, const EngineConfig& cfg) {
  check_dimensions(p, global_best);
  const double phi1 = cfg.c1 * rng.uniform(cfg.r_accel_range);
  const double phi2 = cfg.c2 * rng.uniform(cfg.r_accel_range);
  std::vector<double> next(p.position.size());
  for (std::size_t j = 0; j < next.size(); ++j) {
    const double v = w * p.velocity[j] + phi1 * difference(p.personal_best_position, p.position, j) +
                     phi2 * difference(global_best, p.position, j);
    next[j] = clamp_velocity(v, cfg);
  }
  return VelocityVector(std::move(next));
}

VelocityVector velocity_update_v1(const Particle& p, const BinaryPosition& global_best,
                                  RngStream& rng, const EngineConfig& cfg) {
  check_dimensions(p, global_best);
  const double x = constriction(cfg.C1, cfg.C2, rng.uniform01());
  std::vector<double> next(p.position.size());
  for (std::size_t j = 0; j < next.size(); ++j) {
    const double v = x * (p.velocity[j] + cfg.C1 * difference(p.personal_best_position, p.position, j) +
                          cfg.C2 * difference(global_best, p.position, j));
    next[j] = clamp_velocity(v, cfg);
  }
  return VelocityVector(std::move(next));
}

BinaryPosition position_update(const VelocityVector& v, RngStream& rng, const EngineConfig& cfg) {
  BinaryPosition next(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double r = rng.uniform(cfg.r_threshold_range);
    if (r <= sigmoid(v[j])) next.set(j);
  }
  return next;
}

SwarmState initialize_swarm(std::size_t instance_size, const EngineConfig& cfg, SwarmRng& rng) {
  if (instance_size == 0) throw std::invalid_argument("initialize_swarm: N must be at least 1");
  cfg.validate();
  if (rng.size() != cfg.particles) throw std::invalid_argument("initialize_swarm: RNG/particle count mismatch");

  SwarmState state;
  state.particles.reserve(cfg.particles);
  for (std::size_t id = 0; id < cfg.particles; ++id) {
    RngStream& stream = rng.particle(id);
    const double fraction = stream.uniform(cfg.init_ones_fraction_range);
    const auto ones = std::min(
        instance_size,
        static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(instance_size))));
    BinaryPosition position(instance_size);
    for (std::size_t j : sample_without_replacement(stream, instance_size, ones)) position.set(j);

    std::vector<double> velocity(instance_size);
    for (double& v : velocity) v = stream.uniform01();

    Particle particle;
    particle.id = id;
    particle.position = position;
    particle.velocity = VelocityVector(std::move(velocity));
    particle.personal_best_position = std::move(position);
    state.particles.push_back(std::move(particle));
  }
  return state;
}

SwarmState evaluate_initial(SwarmState state, std::span<const FitnessReport> reports) {
  if (reports.size() != state.particles.size()) {
    throw std::invalid_argument("evaluate_initial: one report per particle required");
  }
  std::size_t best = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    state.particles[i].personal_best_position = state.particles[i].position;
    state.particles[i].personal_best_report = reports[i];
    if (reports[i].fitness > reports[best].fitness) best = i;
  }
  state.global_best_position = state.particles[best].position;
  state.global_best_report = reports[best];
  state.evaluated = true;
  return state;
}

bool should_terminate(const SwarmState& state, const EngineConfig& cfg) {
  return state.global_best_report.fitness >= cfg.target_fitness || state.iteration >= cfg.max_iterations;
}

Proposal propose(const SwarmState& state, const EngineConfig& cfg, SwarmRng& rng) {
  if (!state.evaluated) throw std::logic_error("propose: swarm has not been evaluated");
  Proposal proposal;
  proposal.velocities.reserve(state.particles.size());
  proposal.positions.reserve(state.particles.size());
  const double w = inertia_weight(cfg, state.iteration);
  for (const Particle& p : state.particles) {
    RngStream& stream = rng.particle(p.id);
    VelocityVector v = cfg.variant == Variant::VersionII
                           ? velocity_update_v2(p, state.global_best_position, w, stream, cfg)
                           : velocity_update_v1(p, state.global_best_position, stream, cfg);
    proposal.positions.push_back(position_update(v, stream, cfg));
    proposal.velocities.push_back(std::move(v));
  }
  return proposal;
}

SwarmState absorb(SwarmState state, Proposal proposal, std::span<const FitnessReport> reports) {
  const std::size_t count = state.particles.size();
  if (proposal.positions.size() != count || proposal.velocities.size() != count || reports.size() != count) {
    throw std::invalid_argument("absorb: proposal/report count mismatch");
  }
  std::optional<std::size_t> improved;
  double best_fitness = state.global_best_report.fitness;
  for (std::size_t i = 0; i < count; ++i) {
    Particle& p = state.particles[i];
    p.position = std::move(proposal.positions[i]);
    p.velocity = std::move(proposal.velocities[i]);
    if (reports[i].fitness > p.personal_best_report.fitness) {
      p.personal_best_position = p.position;
      p.personal_best_report = reports[i];
    }
    if (p.personal_best_report.fitness > best_fitness) {
      best_fitness = p.personal_best_report.fitness;
      improved = i;
    }
  }
  if (improved) {
    state.global_best_position = state.particles[*improved].personal_best_position;
    state.global_best_report = state.particles[*improved].personal_best_report;
  }
  ++state.iteration;
  return state;
}

SwarmState step(const SwarmState& state, const FitnessEvaluator& evaluator, const EngineConfig& cfg,
                SwarmRng& rng) {
  Proposal proposal = propose(state, cfg, rng);
  std::vector<FitnessReport> reports;
  reports.reserve(proposal.positions.size());
  for (const auto& position : proposal.positions) reports.push_back(evaluator.evaluate(position));
  return absorb(state, std::move(proposal), reports);
}

BatchEvaluator sequential_batch(const FitnessEvaluator& evaluator) {
  return [&evaluator](std::size_t, std::span<const BinaryPosition> words) {
    std::vector<FitnessReport> reports;
    reports.reserve(words.size());
    for (const auto& w : words) reports.push_back(evaluator.evaluate(w));
    return reports;
  };
}

SwarmRun run_swarm(std::size_t instance_size, const EngineConfig& cfg, const BatchEvaluator& evaluate,
                   const IterationObserver& observer) {
  SwarmRng rng(cfg.seed, cfg.particles);
  SwarmState state = initialize_swarm(instance_size, cfg, rng);

  std::vector<BinaryPosition> initial;
  initial.reserve(state.particles.size());
  for (const auto& p : state.particles) initial.push_back(p.position);
  state = evaluate_initial(std::move(state), evaluate(0, initial));

  SwarmRun run;
  auto record = [&] {
    run.trace.push_back({state.iteration, state.global_best_position, state.global_best_report.fitness});
    if (observer) observer(state);
  };
  record();
  while (!should_terminate(state, cfg)) {
    Proposal proposal = propose(state, cfg, rng);
    std::vector<FitnessReport> reports = evaluate(state.iteration + 1, proposal.positions);
    state = absorb(std::move(state), std::move(proposal), reports);
    record();
  }
  run.final_state = std::move(state);
  return run;
}

}  // namespace phyloswarm
