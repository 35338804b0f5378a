#include "phyloswarm/app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>

#include "phyloswarm/channel.hpp"
#include "phyloswarm/ga.hpp"
#include "phyloswarm/phylo_evaluator.hpp"
#include "phyloswarm/runtime.hpp"
#include "phyloswarm/tree.hpp"

namespace phyloswarm {

namespace fs = std::filesystem;

EvaluatorBundle::EvaluatorBundle(const RunConfig& cfg) : cache_(std::make_shared<MemoCache>()) {
  if (cfg.evaluator == "planted") {
    base_ = std::make_unique<PlantedOracle>(BinaryPosition::from_string(cfg.planted), cfg.noise, cfg.oracle_seed,
                                            cfg.p_mode);
  } else {
    std::optional<std::string> outgroup;
    if (!cfg.outgroup.empty()) outgroup = cfg.outgroup;
    matrix_ = std::make_shared<const GeneMatrix>(load_gene_matrix(cfg.fasta, cfg.partitions, outgroup));
    if (!cfg.external_command.empty()) {
      base_ = std::make_unique<ExternalEvaluator>(matrix_, cfg.external_command, cfg.p_mode);
    } else {
      PhyloSettings settings;
      settings.replicates = cfg.replicates;
      settings.seed = cfg.bootstrap_seed;
      settings.p_mode = cfg.p_mode;
      settings.gap_mode = cfg.gap_mode;
      base_ = std::make_unique<PhyloEvaluator>(matrix_, settings);
      builds_trees_ = true;
    }
  }
  if (!cfg.cache.empty() && fs::exists(cfg.cache)) cache_->load(cfg.cache);
  memoized_ = std::make_unique<MemoizedEvaluator>(*base_, cache_);
}

std::optional<std::string> EvaluatorBundle::newick(const BinaryPosition& w) const {
  if (!builds_trees_ || w.ones_count() == 0) return std::nullopt;
  const auto& phylo = static_cast<const PhyloEvaluator&>(*base_);
  return to_newick(phylo.infer(w), matrix_->outgroup());
}

namespace {

std::string two_digits(std::size_t value) {
  char buffer[24];
  std::snprintf(buffer, sizeof buffer, "%02zu", value);
  return buffer;
}

std::string run_tag(std::size_t swarm, std::size_t rep) { return "s" + two_digits(swarm) + "_r" + two_digits(rep); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::size_t unique_words(const RunLedger& ledger) {
  std::set<std::string> words;
  for (const auto& r : ledger.records()) words.insert(r.word.to_string());
  return words.size();
}

struct Job {
  std::size_t swarm = 0;  // 1-based
  std::size_t rep = 0;
};

struct JobResult {
  RunSummary summary;
  RunLedger ledger;
  std::vector<std::string> events;
};

JobResult run_job(const RunConfig& cfg, const EvaluatorBundle& bundle, const Job& job) {
  const std::size_t n = bundle.instance_size();
  const std::uint64_t seed = run_seed(cfg.engine.seed, job.swarm, job.rep);
  const std::string instance = cfg.instance_name();
  JobResult result;
  RunSummary& s = result.summary;
  s.instance = instance;
  s.method = std::string(to_string(cfg.method));
  s.swarm = job.swarm;
  s.rep = job.rep;
  s.seed = seed;
  s.N = n;

  if (cfg.method == Method::Ga) {
    PipelineConfig pipeline = cfg.pipeline;
    pipeline.seed = seed;
    PipelineResult pr = run_pipeline(bundle.evaluator(), pipeline);
    result.ledger = std::move(pr.ledger);
    s.particles = pipeline.ga.population;
    s.iterations = pr.ga_trace.empty() ? 0 : pr.ga_trace.size() - 1;
    s.terminus = pr.terminus;
    s.best_word = pr.best.word;
    s.best = pr.best.report;
  } else {
    EngineConfig engine = cfg.engine;
    engine.variant = cfg.method == Method::Bpso1 ? Variant::VersionI : Variant::VersionII;
    engine.particles = cfg.particles_for(job.swarm - 1);
    engine.seed = seed;
    MasterOptions options;
    options.run_id = instance + "-" + s.method + "-" + run_tag(job.swarm, job.rep);
    MasterOutcome outcome;
    if (cfg.transport == Transport::Tcp && !cfg.hosts.empty()) {
      std::vector<std::unique_ptr<Channel>> channels;
      for (const auto& host : cfg.hosts) {
        const auto colon = host.rfind(':');
        if (colon == std::string::npos) throw ConfigError("runtime.hosts entry needs host:port, got " + host);
        channels.push_back(connect_tcp(host.substr(0, colon),
                                       static_cast<std::uint16_t>(std::stoul(host.substr(colon + 1)))));
      }
      outcome = master_loop(n, engine, std::move(channels), options);
      outcome.ledger.header["transport"] = "tcp";
    } else {
      const std::size_t workers = cfg.workers ? cfg.workers : engine.particles;
      outcome = run_distributed(n, engine, bundle.evaluator(), workers, cfg.transport, options);
    }
    result.ledger = std::move(outcome.ledger);
    result.events = std::move(outcome.events);
    s.particles = engine.particles;
    s.iterations = outcome.run.final_state.iteration;
    s.best_word = outcome.run.final_state.global_best_position;
    s.best = outcome.run.final_state.global_best_report;
  }
  s.evaluations = result.ledger.size();
  s.unique_words = unique_words(result.ledger);

  auto& h = result.ledger.header;
  h["instance"] = instance;
  h["method"] = s.method;
  h["swarm"] = std::to_string(job.swarm);
  h["rep"] = std::to_string(job.rep);
  h["particles"] = std::to_string(s.particles);
  h["seed"] = std::to_string(seed);
  h["N"] = std::to_string(n);
  h["p_mode"] = std::string(to_string(cfg.p_mode));
  h["evaluator"] = cfg.evaluator;
  if (cfg.method == Method::Ga) h["terminus"] = std::to_string(s.terminus);
  return result;
}

void write_tables(const fs::path& dir, const std::vector<RunLedger>& ledgers) {
  const Table topologies = topology_table(ledgers);
  const Table per_swarm = best_per_swarm_table(ledgers);
  write_text(dir / "topologies.txt", topologies.to_text());
  write_text(dir / "topologies.tsv", topologies.to_tsv());
  write_text(dir / "best_per_swarm.txt", per_swarm.to_text());
  write_text(dir / "best_per_swarm.tsv", per_swarm.to_tsv());
}

}  // namespace

RunOutput execute_runs(const RunConfig& cfg, const EvaluatorBundle& bundle, std::ostream& log) {
  std::vector<Job> jobs;
  for (std::size_t s = 1; s <= cfg.swarms; ++s) {
    for (std::size_t r = 1; r <= cfg.reps; ++r) jobs.push_back({s, r});
  }
  std::vector<std::optional<JobResult>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next++;
      if (i >= jobs.size()) return;
      try {
        results[i] = run_job(cfg, bundle, jobs[i]);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < std::min(cfg.jobs, jobs.size()); ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);

  const fs::path dir = cfg.report_dir;
  fs::create_directories(dir / "ledgers");
  RunOutput output;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    JobResult& r = *results[i];
    const std::string tag = run_tag(jobs[i].swarm, jobs[i].rep);
    r.ledger.save(dir / "ledgers" / ("ledger_" + tag + ".tsv"));
    if (auto tree = bundle.newick(r.summary.best_word)) write_text(dir / ("best_" + tag + ".nwk"), *tree + "\n");
    for (const auto& event : r.events) log << tag << ": " << event << '\n';
    log << tag << ": F=" << format_real(r.summary.best.fitness) << " b=" << format_real(r.summary.best.b)
        << " removed=" << (r.summary.N - r.summary.best_word.ones_count()) << " evaluations=" << r.summary.evaluations;
    if (cfg.method == Method::Ga) {
      log << " terminus=" << r.summary.terminus;
    } else {
      log << " iterations=" << r.summary.iterations;
    }
    log << '\n';
    output.summaries.push_back(std::move(r.summary));
    output.ledgers.push_back(std::move(r.ledger));
  }
  save_summaries(dir / "summary.tsv", output.summaries);
  write_tables(dir, output.ledgers);
  if (!cfg.cache.empty()) bundle.cache()->save(cfg.cache);
  return output;
}

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    EvaluatorBundle bundle(cfg);
    const RunOutput output = execute_runs(cfg, bundle, out);
    out << '\n' << best_per_swarm_table(output.ledgers).to_text() << '\n' << topology_table(output.ledgers).to_text();
    out << "\nresults written to " << cfg.report_dir.string() << '\n';
    return kExitOk;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

std::vector<RunLedger> load_ledgers(const fs::path& result_dir) {
  std::vector<fs::path> files;
  const fs::path dir = result_dir / "ledgers";
  if (!fs::is_directory(dir)) throw std::runtime_error("no ledgers directory in " + result_dir.string());
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".tsv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RunLedger> ledgers;
  for (const auto& file : files) ledgers.push_back(RunLedger::load(file));
  return ledgers;
}

int report_command(const std::vector<fs::path>& result_dirs, const fs::path& out_dir, std::ostream& out,
                   std::ostream& err) {
  try {
    std::vector<RunSummary> summaries;
    if (!out_dir.empty()) fs::create_directories(out_dir);
    for (const auto& dir : result_dirs) {
      const auto ledgers = load_ledgers(dir);
      const fs::path summary = dir / "summary.tsv";
      if (fs::exists(summary)) {
        auto loaded = load_summaries(summary);
        summaries.insert(summaries.end(), loaded.begin(), loaded.end());
      }
      const Table per_swarm = best_per_swarm_table(ledgers);
      const Table topologies = topology_table(ledgers);
      out << "== " << dir.string() << " ==\n\n" << per_swarm.to_text() << '\n' << topologies.to_text() << '\n';
      if (!out_dir.empty()) {
        const std::string name = dir.filename().empty() ? dir.parent_path().filename().string()
                                                        : dir.filename().string();
        write_text(out_dir / ("best_per_swarm_" + name + ".tsv"), per_swarm.to_tsv());
        write_text(out_dir / ("topologies_" + name + ".tsv"), topologies.to_tsv());
      }
    }
    const Table comparison = compare_methods(summaries);
    out << "== methods ==\n\n" << comparison.to_text();
    if (!out_dir.empty()) {
      write_text(out_dir / "compare.txt", comparison.to_text());
      write_text(out_dir / "compare.tsv", comparison.to_tsv());
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

int evaluate_command(const RunConfig& cfg, const std::string& word, std::ostream& out, std::ostream& err) {
  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    EvaluatorBundle bundle(cfg);
    BinaryPosition w;
    try {
      w = BinaryPosition::from_string(word);
    } catch (const std::exception& e) {
      throw InputError(InputErrorCode::DimensionMismatch, std::string("bad word: ") + e.what());
    }
    if (w.size() != bundle.instance_size()) {
      throw InputError(InputErrorCode::DimensionMismatch, "word has " + std::to_string(w.size()) +
                                                              " bits, instance has " +
                                                              std::to_string(bundle.instance_size()));
    }
    const FitnessReport report = bundle.evaluator().evaluate(w);
    out << "word\t" << w.to_string() << "\nb\t" << format_real(report.b) << "\np\t" << format_real(report.p)
        << "\nfitness\t" << format_real(report.fitness) << "\ntopology_id\t" << report.topology_id << '\n';
    if (auto tree = bundle.newick(w)) out << "newick\t" << *tree << '\n';
    return kExitOk;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

int serve_worker_command(const RunConfig& cfg, std::size_t max_connections, std::ostream& out, std::ostream& err) {
  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    EvaluatorBundle bundle(cfg);
    TcpListener listener(cfg.port, "0.0.0.0");
    out << "listening on port " << listener.port() << std::endl;
    serve_worker(bundle.evaluator(), listener, max_connections);
    return kExitOk;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gene-subset search for well-supported phylogenies (BPSO and GA)"};
  app.name(args.empty() ? "phyloswarm" : fs::path(args.front()).filename().string());
  app.require_subcommand(1);

  struct Common {
    std::string config;
    std::vector<std::string> sets;
    std::vector<std::pair<std::string, std::string>> flags;
  } common;

  auto add_common = [&](CLI::App* sub, bool run_flags) {
    sub->add_option("--config", common.config, "Run configuration file")->check(CLI::ExistingFile);
    sub->add_option("--set", common.sets, "Override a config key (key=value)");
    auto flag = [&](const std::string& name, const std::string& key, const std::string& help) {
      sub->add_option_function<std::string>(
          name, [&common, key](const std::string& v) { common.flags.emplace_back(key, v); }, help);
    };
    flag("--seed", "engine.seed", "Base seed");
    flag("--port", "runtime.port", "Worker port");
    if (run_flags) {
      sub->add_option_function<std::string>(
             "--method", [&common](const std::string& v) { common.flags.emplace_back("runtime.method", v); },
             "Search method")
          ->check(CLI::IsMember({"bpso1", "bpso2", "ga"}));
      flag("--particles", "engine.L", "Particles per swarm (comma list cycles over swarms)");
      flag("--swarms", "runtime.swarms", "Number of swarms");
      flag("--reps", "runtime.reps", "Repetitions per swarm");
      sub->add_option_function<std::string>(
             "--transport", [&common](const std::string& v) { common.flags.emplace_back("runtime.transport", v); },
             "Worker transport")
          ->check(CLI::IsMember({"local", "tcp"}));
    }
  };

  CLI::App* run = app.add_subcommand("run", "Run the configured method over all swarms and repetitions");
  add_common(run, true);

  std::vector<std::string> report_dirs;
  std::string report_out;
  CLI::App* report = app.add_subcommand("report", "Rebuild tables from result directories");
  report->add_option("dirs", report_dirs, "Result directories")->required()->check(CLI::ExistingDirectory);
  report->add_option("--out", report_out, "Directory for table files");

  std::string word;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Score one gene-subset word");
  add_common(evaluate, false);
  evaluate->add_option("word", word, "Binary word, one character per gene in sorted order")->required();

  std::size_t max_connections = 0;
  CLI::App* serve = app.add_subcommand("serve-worker", "Serve fitness evaluations over TCP");
  add_common(serve, false);
  serve->add_option("--max-connections", max_connections, "Exit after this many sessions (0: never)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("phyloswarm");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (report->parsed()) {
    std::vector<fs::path> dirs(report_dirs.begin(), report_dirs.end());
    return report_command(dirs, report_out, out, err);
  }

  RunConfig cfg;
  try {
    if (!common.config.empty()) cfg = load_config(common.config);
    for (const auto& assignment : common.sets) apply_override(cfg, assignment);
    for (const auto& [key, value] : common.flags) apply_setting(cfg, key, value);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  if (run->parsed()) return run_command(cfg, out, err);
  if (evaluate->parsed()) return evaluate_command(cfg, word, out, err);
  return serve_worker_command(cfg, max_connections, out, err);
}

}  // namespace phyloswarm
