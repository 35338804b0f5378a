#include "phyloswarm/ga.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace phyloswarm {

void PipelineConfig::validate() const {
  if (random_removal_min > random_removal_max) throw std::invalid_argument("ga: random_removal_range out of order");
  if (random_removal_min < 2) throw std::invalid_argument("ga: random removals start at 2 genes");
  if (ga.population < 2) throw std::invalid_argument("ga: population must be at least 2");
  if (ga.tournament < 1) throw std::invalid_argument("ga: tournament size must be at least 1");
  if (ga.elitism > ga.population) throw std::invalid_argument("ga: elitism exceeds population");
  if (!(ga.crossover >= 0.0 && ga.crossover <= 1.0)) throw std::invalid_argument("ga: crossover rate outside [0,1]");
  if (ga.mutation && !(*ga.mutation >= 0.0 && *ga.mutation <= 1.0)) {
    throw std::invalid_argument("ga: mutation rate outside [0,1]");
  }
}

std::optional<FitnessReport> EvaluationContext::request(std::size_t stage, const BinaryPosition& w,
                                                       std::size_t budget) {
  if (!cache_.contains(w)) {
    if (stage_misses_.at(stage) >= budget) return std::nullopt;
    ++stage_misses_[stage];
  }
  FitnessReport report = cache_.evaluate(evaluator_, w);
  ledger_.append({stage, ledger_.size(), w, report, 0.0});
  return report;
}

std::size_t EvaluationContext::stage_misses(std::size_t stage) const { return stage_misses_.at(stage); }

namespace {

bool improves(const FitnessReport& candidate, const FitnessReport& incumbent) {
  return candidate.fitness > incumbent.fitness;
}

}  // namespace

StageResult systematic_stage(EvaluationContext& ctx, const PipelineConfig& cfg) {
  const std::size_t n = ctx.instance_size();
  if (n == 0) throw std::invalid_argument("systematic stage: N must be at least 1");
  StageResult result;
  std::size_t best_deletions = 0;
  bool have_best = false;
  auto consider = [&](BinaryPosition w, std::size_t deletions) {
    auto report = ctx.request(1, w, cfg.systematic_budget);
    if (!report) return false;
    result.words.push_back(w);
    const bool better =
        !have_best || report->fitness > result.best.report.fitness ||
        (report->fitness == result.best.report.fitness &&
         (deletions < best_deletions || (deletions == best_deletions && w < result.best.word)));
    if (better) {
      result.best = {std::move(w), *report};
      best_deletions = deletions;
      have_best = true;
    }
    return true;
  };
  if (consider(BinaryPosition::all_ones(n), 0)) {
    for (std::size_t j = 0; j < n; ++j) {
      BinaryPosition w = BinaryPosition::all_ones(n);
      w.set(j, false);
      if (!consider(std::move(w), 1)) break;
    }
  }
  if (!have_best) throw std::invalid_argument("systematic stage: budget allows no evaluation");
  result.reached_target = result.best.report.fitness >= cfg.target_fitness;
  return result;
}

StageResult random_stage(EvaluationContext& ctx, const Candidate& incumbent, const PipelineConfig& cfg,
                         RngStream& rng) {
  const std::size_t n = ctx.instance_size();
  StageResult result;
  result.best = incumbent;
  result.reached_target = incumbent.report.fitness >= cfg.target_fitness;
  // At least one gene stays selected.
  const std::size_t hi = std::min(cfg.random_removal_max, n > 0 ? n - 1 : 0);
  const std::size_t lo = cfg.random_removal_min;
  if (lo > hi) return result;

  for (std::size_t draw = 0; draw < cfg.random_budget && !result.reached_target; ++draw) {
    const auto removals = static_cast<std::size_t>(rng.uniform_int(lo, hi));
    BinaryPosition w = BinaryPosition::all_ones(n);
    for (std::size_t j : sample_without_replacement(rng, n, removals)) w.set(j, false);
    auto report = ctx.request(2, w, kUnlimited);
    result.words.push_back(w);
    if (improves(*report, result.best.report)) result.best = {std::move(w), *report};
    result.reached_target = result.best.report.fitness >= cfg.target_fitness;
  }
  return result;
}

namespace {

std::size_t tournament_pick(const std::vector<Candidate>& population, std::size_t size, RngStream& rng) {
  std::size_t best = static_cast<std::size_t>(rng.uniform_int(0, population.size() - 1));
  for (std::size_t k = 1; k < size; ++k) {
    const auto challenger = static_cast<std::size_t>(rng.uniform_int(0, population.size() - 1));
    const double fc = population[challenger].report.fitness;
    const double fb = population[best].report.fitness;
    if (fc > fb || (fc == fb && challenger < best)) best = challenger;
  }
  return best;
}

}  // namespace

StageResult ga_stage(EvaluationContext& ctx, const std::optional<Candidate>& incumbent,
                     const PipelineConfig& cfg, RngStream& rng) {
  const std::size_t n = ctx.instance_size();
  const GaSettings& ga = cfg.ga;
  if (ga.population < 2) throw std::invalid_argument("ga stage: population must be at least 2");
  const double mutation = ga.mutation.value_or(1.0 / static_cast<double>(n));

  StageResult result;
  std::vector<Candidate> population;
  bool exhausted = false;
  if (incumbent) population.push_back(*incumbent);
  while (population.size() < ga.population) {
    const double density = rng.uniform(0.5, 1.0);
    BinaryPosition w(n);
    for (std::size_t j = 0; j < n; ++j) w.set(j, rng.bernoulli(density));
    auto report = ctx.request(3, w, cfg.ga_budget);
    if (!report) {
      exhausted = true;
      break;
    }
    result.words.push_back(w);
    population.push_back({std::move(w), *report});
  }
  if (population.empty()) {
    throw std::invalid_argument("ga stage: budget allows no evaluation and there is no incumbent");
  }

  auto best_of = [](const std::vector<Candidate>& pop) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pop.size(); ++i) {
      if (pop[i].report.fitness > pop[best].report.fitness) best = i;
    }
    return best;
  };
  result.best = population[best_of(population)];
  result.best_trace.push_back(result.best.report.fitness);

  for (std::size_t generation = 1; generation <= ga.generations && !exhausted; ++generation) {
    if (result.best.report.fitness >= cfg.target_fitness) break;

    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return population[a].report.fitness > population[b].report.fitness;
    });
    std::vector<Candidate> next;
    for (std::size_t e = 0; e < std::min(ga.elitism, order.size()); ++e) next.push_back(population[order[e]]);

    while (next.size() < ga.population) {
      const Candidate& a = population[tournament_pick(population, ga.tournament, rng)];
      const Candidate& b = population[tournament_pick(population, ga.tournament, rng)];
      BinaryPosition child = a.word;
      if (rng.bernoulli(ga.crossover)) {
        for (std::size_t j = 0; j < n; ++j) {
          if (rng.bernoulli(0.5)) child.set(j, b.word.test(j));
        }
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (rng.bernoulli(mutation)) child.flip(j);
      }
      auto report = ctx.request(3, child, cfg.ga_budget);
      if (!report) {
        exhausted = true;
        break;
      }
      result.words.push_back(child);
      next.push_back({std::move(child), *report});
    }
    population = std::move(next);
    const Candidate& generation_best = population[best_of(population)];
    if (improves(generation_best.report, result.best.report)) result.best = generation_best;
    result.best_trace.push_back(result.best.report.fitness);
  }
  result.reached_target = result.best.report.fitness >= cfg.target_fitness;
  return result;
}

PipelineResult run_pipeline(const FitnessEvaluator& evaluator, const PipelineConfig& cfg) {
  cfg.validate();
  EvaluationContext ctx(evaluator);
  const RngStream root(cfg.seed);
  PipelineResult result;

  StageResult stage = systematic_stage(ctx, cfg);
  result.terminus = 1;
  Candidate best = stage.best;
  if (!stage.reached_target) {
    RngStream rng = root.split(2);
    stage = random_stage(ctx, best, cfg, rng);
    result.terminus = 2;
    best = stage.best;
  }
  if (!stage.reached_target) {
    RngStream rng = root.split(3);
    stage = ga_stage(ctx, best, cfg, rng);
    result.terminus = 3;
    if (improves(stage.best.report, best.report)) best = stage.best;
    result.ga_trace = stage.best_trace;
  }

  result.best = std::move(best);
  result.evaluations = ctx.misses();
  result.requests = ctx.requests();
  result.unique_words = ctx.unique_words();
  result.stage_evaluations = {0, ctx.stage_misses(1), ctx.stage_misses(2), ctx.stage_misses(3)};
  result.ledger = ctx.ledger();
  return result;
}

}  // namespace phyloswarm
