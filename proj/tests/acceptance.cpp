// Runs the acceptance criteria and prints one PASS/FAIL line each. With an
// argument, runs only that criterion (1-8). Exit status is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "phyloswarm/engine.hpp"
#include "phyloswarm/fitness.hpp"
#include "phyloswarm/ga.hpp"
#include "phyloswarm/phylo_evaluator.hpp"
#include "phyloswarm/runtime.hpp"
#include "phyloswarm/synthetic.hpp"
#include "phyloswarm/tree.hpp"
#include "phyloswarm/wire.hpp"

using namespace phyloswarm;

namespace {

constexpr double kFormulaTolerance = 1e-12;
constexpr int kRequiredSuccesses = 18;  // of 20 seeded runs
constexpr std::size_t kRuns = 20;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& note) {
    pass = pass && ok;
    notes.push_back((ok ? "ok    " : "FAILED ") + note);
  }
  void info(const std::string& note) { notes.push_back("info  " + note); }
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, format, a, b, c);
  return buffer;
}

std::string tally(const std::string& label, int successes, std::size_t runs) {
  return label + ": " + std::to_string(successes) + "/" + std::to_string(runs);
}

bool non_decreasing(const std::vector<double>& values) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[i - 1]) return false;
  }
  return true;
}

std::vector<double> fitness_trace(const SwarmRun& run) {
  std::vector<double> out;
  for (const auto& entry : run.trace) out.push_back(entry.fitness);
  return out;
}

BinaryPosition planted_word(std::size_t n, std::mt19937_64& gen) {
  auto w = BinaryPosition::all_ones(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (gen() % 4 == 0) w.set(j, false);
  }
  if (w.ones_count() == 0) w.set(0, true);
  return w;
}

const BlurringFixture& fixture() {
  static const BlurringFixture f = make_blurring_fixture();
  return f;
}

const FitnessEvaluator& fixture_evaluator() {
  static const PhyloEvaluator base(std::make_shared<const GeneMatrix>(fixture().matrix), PhyloSettings{});
  static const MemoizedEvaluator memo(base);
  return memo;
}

EngineConfig fixture_engine(std::uint64_t seed, Interval threshold) {
  EngineConfig cfg;
  cfg.seed = seed;
  cfg.max_iterations = 100;
  cfg.target_fitness = 95.0;
  cfg.r_threshold_range = threshold;
  return cfg;
}

// Formula conformance.
Outcome criterion1() {
  Outcome o;
  const double s = sigmoid(0.51);
  const double expected = 1.0 / (1.0 + std::exp(-0.51));
  o.require(std::fabs(s - expected) <= kFormulaTolerance, fmt("sigmoid(0.51) = %.15f, closed form %.15f", s, expected));
  o.require(std::round(s * 100.0) / 100.0 == 0.62, fmt("sigmoid(0.51) rounds to %.2f", std::round(s * 100.0) / 100.0));

  EngineConfig cfg;
  cfg.max_iterations = 100;
  o.require(inertia_weight(cfg, 0) == 0.9, fmt("w(0) = %.17g", inertia_weight(cfg, 0)));
  o.require(inertia_weight(cfg, cfg.max_iterations) == 0.4, fmt("w(I_max) = %.17g", inertia_weight(cfg, 100)));
  bool linear = true;
  for (std::size_t t = 0; t <= cfg.max_iterations; ++t) {
    const double closed = 0.9 - (0.9 - 0.4) * static_cast<double>(t) / 100.0;
    linear = linear && std::fabs(inertia_weight(cfg, t) - closed) <= kFormulaTolerance;
  }
  o.require(linear, "w(t) is linear between the endpoints");

  double worst = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double k = i / 100.0;
    const double closed = k * 2.0 / std::fabs(2.0 - 4.1 - std::sqrt(0.41));
    worst = std::max(worst, std::fabs(constriction(2.05, 2.05, k) - closed));
  }
  o.require(worst <= kFormulaTolerance, fmt("constriction over k in [0,1], max deviation %.3g", worst));
  return o;
}

// Fitness arithmetic in count mode.
Outcome criterion2() {
  Outcome o;
  struct Row {
    double b, p, f;
  };
  for (const Row& row : {Row{92, 63, 77.5}, Row{89, 30, 59.5}, Row{76, 67, 71.5}}) {
    auto w = BinaryPosition::all_zeros(82);
    for (std::size_t j = 0; j < static_cast<std::size_t>(row.p); ++j) w.set(j, true);
    const double p = inclusion_score(w, PMode::Count);
    const double f = combine_fitness(row.b, p);
    o.require(p == row.p && f == row.f && make_report(row.b, p).fitness == row.f,
              fmt("(b=%g, p=%g) -> F=%g", row.b, p, f));
  }
  return o;
}

// Brute-force optimum on planted oracles.
Outcome criterion3() {
  Outcome o;
  struct Suite {
    std::string name;
    double noise;
    PMode mode;
  };
  for (const Suite& suite : {Suite{"percent mode, noise 2", 2.0, PMode::Percent},
                             Suite{"count mode, noise 0", 0.0, PMode::Count}}) {
    std::mt19937_64 gen(2026);
    int bpso = 0;
    int bpso_wide = 0;
    int ga = 0;
    for (std::size_t i = 0; i < kRuns; ++i) {
      const std::size_t n = 10 + i % 7;
      PlantedOracle ev(planted_word(n, gen), suite.noise, 1000 + i, suite.mode);
      const double optimum = oracle::brute_force_max(ev).second;

      EngineConfig engine;
      engine.particles = 10;
      engine.max_iterations = 200;
      engine.target_fitness = 101.0;
      engine.seed = i + 1;
      bpso += run_swarm(n, engine, ev).final_state.global_best_report.fitness == optimum;
      engine.r_threshold_range = {0.0, 1.0};
      bpso_wide += run_swarm(n, engine, ev).final_state.global_best_report.fitness == optimum;

      PipelineConfig pipeline;
      pipeline.target_fitness = 101.0;
      pipeline.seed = i + 1;
      ga += run_pipeline(ev, pipeline).best.report.fitness == optimum;
    }
    o.require(bpso >= kRequiredSuccesses, tally("BPSO-II L=10 I_max=200, " + suite.name, bpso, kRuns));
    o.require(ga >= kRequiredSuccesses, tally("GA pipeline, " + suite.name, ga, kRuns));
    o.info(tally("BPSO-II L=10 I_max=200, r in [0,1], " + suite.name, bpso_wide, kRuns));
  }
  return o;
}

// Discordant-gene fixture.
Outcome criterion4() {
  Outcome o;
  const auto& f = fixture();
  const auto& ev = fixture_evaluator();
  const std::size_t n = f.matrix.gene_count();
  o.require(f.matrix.taxon_count() == 8 && n == 10 && f.blurring_gene.has_value(), "8 taxa, 10 genes, 1 discordant");

  EvaluationContext ctx(ev);
  const auto stage = systematic_stage(ctx, PipelineConfig{});
  const auto all_ones = ev.evaluate(BinaryPosition::all_ones(n));
  o.require(ctx.misses() == n + 1, "systematic stage evaluations: " + std::to_string(ctx.misses()));
  o.require(stage.best.word == word_without(n, *f.blurring_gene),
            "systematic stage returns " + stage.best.word.to_string());
  o.require(stage.best.report.b == 100.0, fmt("b = %g", stage.best.report.b));
  o.require(stage.best.report.fitness > all_ones.fitness,
            fmt("F = %g > F(all ones) = %g", stage.best.report.fitness, all_ones.fitness));

  auto successes = [&](Interval threshold) {
    int hits = 0;
    for (std::size_t seed = 1; seed <= kRuns; ++seed) {
      const auto run = run_swarm(n, fixture_engine(seed, threshold), ev);
      hits += run.final_state.global_best_report.fitness >= 95.0;
    }
    return hits;
  };
  const int narrow = successes({0.1, 0.5});
  o.require(narrow >= kRequiredSuccesses, tally("BPSO-II F >= 95 within 100 iterations", narrow, kRuns));
  const int wide = successes({0.0, 1.0});
  o.info(tally("BPSO-II F >= 95 within 100 iterations, r in [0,1]", wide, kRuns));
  return o;
}

// Neighbor joining on additive matrices.
Outcome criterion5() {
  Outcome o;
  std::mt19937_64 gen(5005);
  int recovered = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto ref = oracle::random_tree(4 + trial % 5, gen);
    const auto tree = neighbor_joining(ref.additive_distances(), ref.taxa);
    recovered += oracle::signature_splits(topology_signature(tree), ref) == ref.splits();
  }
  o.require(recovered == 500, tally("topologies recovered", recovered, 500));

  int invariant = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 4 + trial % 5;
    const auto ref = oracle::random_tree(n, gen);
    const auto d = ref.additive_distances();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    DistanceMatrix pd(n);
    std::vector<std::string> taxa(n);
    for (std::size_t i = 0; i < n; ++i) {
      taxa[i] = ref.taxa[perm[i]];
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) pd.set(i, j, d(perm[i], perm[j]));
      }
    }
    const auto a = topology_signature(neighbor_joining(d, ref.taxa));
    const auto b = topology_signature(neighbor_joining(pd, taxa));
    invariant += a == b && a.id() == b.id();
  }
  o.require(invariant == 200, tally("signatures invariant under leaf permutation", invariant, 200));
  return o;
}

// Sequential and distributed runs agree.
Outcome criterion6() {
  Outcome o;
  const auto& ev = fixture_evaluator();
  const std::size_t n = fixture().matrix.gene_count();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto cfg = fixture_engine(seed, {0.1, 0.5});
    cfg.target_fitness = 101.0;
    const auto single = run_distributed(n, cfg, ev, 1, Transport::Local);
    const auto tcp = run_distributed(n, cfg, ev, 10, Transport::Tcp);
    bool same_ledger = single.ledger.size() == tcp.ledger.size();
    for (std::size_t i = 0; same_ledger && i < single.ledger.size(); ++i) {
      same_ledger = single.ledger.records()[i].same_result(tcp.ledger.records()[i]);
    }
    const bool same = single.run.trace == tcp.run.trace && same_ledger && tcp.registered_workers == 10;
    o.require(same, "seed " + std::to_string(seed) + ": " + std::to_string(single.run.trace.size()) +
                        " trace entries, 1 local worker vs 10 tcp workers");
  }
  return o;
}

// Monotone bests and stage short-circuiting.
Outcome criterion7() {
  Outcome o;
  std::mt19937_64 gen(77);
  int monotone_runs = 0;
  int runs = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    PlantedOracle ev(planted_word(14, gen), 3.0, i);
    for (Variant variant : {Variant::VersionI, Variant::VersionII}) {
      EngineConfig cfg;
      cfg.variant = variant;
      cfg.seed = i;
      cfg.target_fitness = 101.0;
      ++runs;
      monotone_runs += non_decreasing(fitness_trace(run_swarm(14, cfg, ev)));
    }
    PipelineConfig pipeline;
    pipeline.seed = i;
    pipeline.target_fitness = 101.0;
    ++runs;
    monotone_runs += non_decreasing(run_pipeline(ev, pipeline).ga_trace);
  }
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ++runs;
    monotone_runs += non_decreasing(fitness_trace(
        run_swarm(fixture().matrix.gene_count(), fixture_engine(seed, {0.1, 0.5}), fixture_evaluator())));
  }
  o.require(monotone_runs == runs, tally("runs with non-decreasing best", monotone_runs, runs));

  auto by_ones = [](std::size_t n, std::size_t wanted) {
    return FunctionEvaluator(n, [wanted](const BinaryPosition& w) {
      return w.ones_count() == wanted ? make_report(100, 100) : make_report(50, 50);
    });
  };
  struct Case {
    std::string name;
    std::function<PipelineResult()> run;
    int terminus;
  };
  const std::vector<Case> cases{
      {"fixture", [] { return run_pipeline(fixture_evaluator(), PipelineConfig{}); }, 1},
      {"all genes concordant", [] { return run_pipeline(PlantedOracle(BinaryPosition::all_ones(12)), PipelineConfig{}); }, 1},
      {"optimum three genes away", [&] { return run_pipeline(by_ones(10, 7), PipelineConfig{}); }, 2},
      {"optimum eight genes away", [&] { return run_pipeline(by_ones(10, 2), PipelineConfig{}); }, 3},
  };
  for (const auto& c : cases) {
    const auto r = c.run();
    bool later_stages_idle = true;
    for (std::size_t s = static_cast<std::size_t>(r.terminus) + 1; s <= 3; ++s) {
      later_stages_idle = later_stages_idle && r.stage_evaluations[s] == 0;
    }
    o.require(r.terminus == c.terminus && r.best.report.fitness >= 95.0 && later_stages_idle,
              c.name + ": terminus " + std::to_string(r.terminus) + ", F " + fmt("%g", r.best.report.fitness));
  }
  return o;
}

// Wire protocol.
Outcome criterion8() {
  Outcome o;
  std::mt19937_64 gen(8);
  constexpr int kMessages = 10000;
  int identical = 0;
  for (int i = 0; i < kMessages; ++i) {
    const auto m = oracle::random_message(gen);
    const std::string frame = encode_frame(m);
    identical += decode_frame(frame) == m && encode_frame(decode_frame(frame)) == frame;
  }
  o.require(identical == kMessages, tally("round trips", identical, kMessages));

  auto code_of = [](const std::string& frame) -> std::optional<FrameErrorCode> {
    try {
      decode_frame(frame);
    } catch (const FrameError& e) {
      return e.code();
    }
    return std::nullopt;
  };
  const std::string frame = encode_frame(make_hello("acceptance"));
  std::string oversize;
  for (int shift = 24; shift >= 0; shift -= 8) {
    oversize.push_back(static_cast<char>(((kMaxPayloadBytes + 1) >> shift) & 0xff));
  }
  oversize += "kind=STOP";
  o.require(code_of(frame.substr(0, frame.size() - 1)) == FrameErrorCode::LengthMismatch, "truncated frame");
  o.require(code_of(frame + "!") == FrameErrorCode::LengthMismatch, "overlong frame");
  o.require(code_of(oversize) == FrameErrorCode::TooLarge, "frame above the size cap");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"formula conformance", criterion1},
      {"fitness arithmetic", criterion2},
      {"brute-force optimum on planted oracles", criterion3},
      {"discordant-gene fixture", criterion4},
      {"neighbor joining correctness", criterion5},
      {"sequential and distributed runs agree", criterion6},
      {"monotonicity and terminus", criterion7},
      {"wire protocol round trip", criterion8},
  };
  std::size_t only = 0;
  if (argc > 1) {
    only = std::strtoul(argv[1], nullptr, 10);
    if (only < 1 || only > criteria.size()) {
      std::fprintf(stderr, "usage: %s [1-%zu]\n", argv[0], criteria.size());
      return 2;
    }
  }
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && i + 1 != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome.require(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !outcome.pass;
    std::printf("%s %zu %s (%.2fs)\n", outcome.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), seconds);
    for (const auto& note : outcome.notes) std::printf("       %s\n", note.c_str());
    std::fflush(stdout);
  }
  return failures;
}
