#pragma once

// Three-stage baseline pipeline:
//   1. systematic: the full gene set and every single-gene deletion (N+1 words)
//   2. random: remove a random 2..5 genes from the full set, repeatedly
//   3. a generational genetic algorithm over binary words
// Each stage runs only if the previous one missed the target fitness.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "phyloswarm/bitspace.hpp"
#include "phyloswarm/fitness.hpp"
#include "phyloswarm/ledger.hpp"
#include "phyloswarm/rng.hpp"

namespace phyloswarm {

struct GaSettings {
  std::size_t population = 30;
  std::size_t generations = 200;
  double crossover = 0.9;
  std::optional<double> mutation;  // per-bit flip probability; 1/N when unset
  std::size_t tournament = 3;
  std::size_t elitism = 1;
};

inline constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

struct PipelineConfig {
  // Caps on evaluator invocations (cache misses) in stages 1 and 3.
  std::size_t systematic_budget = kUnlimited;
  std::size_t random_budget = 100;  // random words drawn, repeats included
  std::size_t ga_budget = kUnlimited;
  std::size_t random_removal_min = 2;
  std::size_t random_removal_max = 5;
  GaSettings ga;
  double target_fitness = 95.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Candidate {
  BinaryPosition word;
  FitnessReport report;
};

/// Shared evaluation bookkeeping for one pipeline run: a private memo cache,
/// per-stage miss counts, and a ledger of every request.
class EvaluationContext {
 public:
  explicit EvaluationContext(const FitnessEvaluator& evaluator) : evaluator_(evaluator) {}

  /// Scores w on behalf of `stage` unless doing so would need a fresh
  /// evaluation beyond `budget` misses for that stage.
  std::optional<FitnessReport> request(std::size_t stage, const BinaryPosition& w, std::size_t budget);

  std::size_t instance_size() const { return evaluator_.instance_size(); }
  std::size_t misses() const { return cache_.misses(); }
  std::size_t stage_misses(std::size_t stage) const;
  std::size_t requests() const noexcept { return ledger_.size(); }
  std::size_t unique_words() const { return cache_.size(); }
  const RunLedger& ledger() const noexcept { return ledger_; }
  RunLedger& ledger() noexcept { return ledger_; }

 private:
  const FitnessEvaluator& evaluator_;
  MemoCache cache_;
  std::vector<std::size_t> stage_misses_ = std::vector<std::size_t>(4, 0);
  RunLedger ledger_;
};

struct StageResult {
  Candidate best;
  std::vector<BinaryPosition> words;  // evaluated, in order
  std::vector<double> best_trace;     // GA only: best fitness per generation
  bool reached_target = false;
};

StageResult systematic_stage(EvaluationContext& ctx, const PipelineConfig& cfg);
StageResult random_stage(EvaluationContext& ctx, const Candidate& incumbent, const PipelineConfig& cfg,
                         RngStream& rng);
StageResult ga_stage(EvaluationContext& ctx, const std::optional<Candidate>& incumbent,
                     const PipelineConfig& cfg, RngStream& rng);

struct PipelineResult {
  int terminus = 0;  // 1 systematic, 2 random, 3 genetic algorithm
  Candidate best;
  std::size_t evaluations = 0;  // evaluator invocations (cache misses)
  std::size_t requests = 0;     // words scored, repeats included
  std::size_t unique_words = 0;
  std::vector<std::size_t> stage_evaluations;  // index 1..3
  std::vector<double> ga_trace;
  RunLedger ledger;
};

PipelineResult run_pipeline(const FitnessEvaluator& evaluator, const PipelineConfig& cfg);

}  // namespace phyloswarm
