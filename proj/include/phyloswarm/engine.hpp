#pragma once

// Binary particle swarm optimization over {0,1}^N.
//
// Version II uses the inertia-weighted velocity rule
//   V <- w*V + c1*r1*(Pbest - X) + c2*r2*(Gbest - X)
// with w decaying linearly from w_max to w_min over max_iterations.
// Version I uses the constriction rule
//   V <- x * [V + C1*(Pbest - X) + C2*(Gbest - X)],
//   x = 2k / |2 - C - sqrt(C(C-4))|,  C = C1 + C2 >= 4,  k ~ U[0,1].
// Either way a bit becomes 1 when r_ij <= sigmoid(V_ij).
//
// The swarm step is split into propose() (all random draws, new positions)
// and absorb() (fold reports into personal and global bests) so that the
// evaluations in between can run anywhere, in any order.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "phyloswarm/bitspace.hpp"
#include "phyloswarm/fitness.hpp"
#include "phyloswarm/rng.hpp"

namespace phyloswarm {

enum class Variant { VersionI, VersionII };

std::string_view to_string(Variant variant) noexcept;
Variant parse_variant(std::string_view text);

struct EngineConfig {
  Variant variant = Variant::VersionII;
  std::size_t particles = 10;         // L
  std::size_t max_iterations = 100;   // I_max
  double c1 = 1.0;                    // Version II accelerations
  double c2 = 1.0;
  double C1 = 2.05;                   // Version I accelerations
  double C2 = 2.05;
  double w_max = 0.9;
  double w_min = 0.4;
  Interval r_accel_range{0.1, 0.5};
  Interval r_threshold_range{0.1, 0.5};
  double target_fitness = 95.0;
  Interval init_ones_fraction_range{0.85, 1.0};
  std::optional<Interval> velocity_clamp;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;
};

struct Particle {
  std::size_t id = 0;
  BinaryPosition position;
  VelocityVector velocity;
  BinaryPosition personal_best_position;
  FitnessReport personal_best_report;
};

struct SwarmState {
  std::vector<Particle> particles;
  BinaryPosition global_best_position;
  FitnessReport global_best_report;
  std::size_t iteration = 0;
  bool evaluated = false;
};

/// One independent stream per particle, split from the run seed.
class SwarmRng {
 public:
  SwarmRng(std::uint64_t seed, std::size_t particles);
  RngStream& particle(std::size_t id) { return streams_.at(id); }
  std::size_t size() const noexcept { return streams_.size(); }
  bool operator==(const SwarmRng&) const = default;

 private:
  std::vector<RngStream> streams_;
};

double sigmoid(double v);
double inertia_weight(const EngineConfig& cfg, std::size_t iteration);
double constriction(double C1, double C2, double k);

VelocityVector velocity_update_v2(const Particle& p, const BinaryPosition& global_best, double w,
                                  RngStream& rng, const EngineConfig& cfg);
VelocityVector velocity_update_v1(const Particle& p, const BinaryPosition& global_best,
                                  RngStream& rng, const EngineConfig& cfg);
BinaryPosition position_update(const VelocityVector& v, RngStream& rng, const EngineConfig& cfg);

/// Positions and velocities drawn fresh; reports are not known yet.
SwarmState initialize_swarm(std::size_t instance_size, const EngineConfig& cfg, SwarmRng& rng);
/// Installs the reports for the initial positions as personal bests and
/// picks the global best (highest fitness, lowest particle id on ties).
SwarmState evaluate_initial(SwarmState state, std::span<const FitnessReport> reports);

bool should_terminate(const SwarmState& state, const EngineConfig& cfg);

struct Proposal {
  std::vector<VelocityVector> velocities;
  std::vector<BinaryPosition> positions;
};

Proposal propose(const SwarmState& state, const EngineConfig& cfg, SwarmRng& rng);
/// Moves particles to the proposal and refreshes bests. Replacement needs a
/// strict improvement; ties keep the incumbent.
SwarmState absorb(SwarmState state, Proposal proposal, std::span<const FitnessReport> reports);

SwarmState step(const SwarmState& state, const FitnessEvaluator& evaluator, const EngineConfig& cfg,
                SwarmRng& rng);

/// Scores a batch of positions; element i of the result belongs to position i.
using BatchEvaluator =
    std::function<std::vector<FitnessReport>(std::size_t iteration, std::span<const BinaryPosition>)>;

BatchEvaluator sequential_batch(const FitnessEvaluator& evaluator);

struct TraceEntry {
  std::size_t iteration = 0;
  BinaryPosition word;
  double fitness = 0.0;
  bool operator==(const TraceEntry&) const = default;
};

struct SwarmRun {
  SwarmState final_state;
  std::vector<TraceEntry> trace;  // global best after each iteration, starting at 0
};

using IterationObserver = std::function<void(const SwarmState&)>;

/// Initializes, evaluates and steps until should_terminate.
SwarmRun run_swarm(std::size_t instance_size, const EngineConfig& cfg, const BatchEvaluator& evaluate,
                   const IterationObserver& observer = {});

inline SwarmRun run_swarm(std::size_t instance_size, const EngineConfig& cfg,
                          const FitnessEvaluator& evaluator) {
  return run_swarm(instance_size, cfg, sequential_batch(evaluator));
}

}  // namespace phyloswarm
