#pragma once

// Run configuration: flat `key = value` lines, `#` starts a comment.
//
//   engine.L = 10, 15            particle counts, cycled over swarms
//   engine.I_max = 100
//   engine.r_threshold_range = 0.1, 0.5
//   phylo.fasta = genes.fasta    relative paths resolve against the file
//   runtime.method = bpso2
//
// Section prefixes: engine. fitness. phylo. ga. runtime. report.
// Unknown keys are errors. `--set key=value` applies the same grammar.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "phyloswarm/bitspace.hpp"
#include "phyloswarm/bootstrap.hpp"
#include "phyloswarm/engine.hpp"
#include "phyloswarm/ga.hpp"
#include "phyloswarm/runtime.hpp"

namespace phyloswarm {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Method { Bpso1, Bpso2, Ga };

std::string_view to_string(Method method) noexcept;
Method parse_method(std::string_view text);

struct RunConfig {
  EngineConfig engine;
  std::vector<std::size_t> particle_counts{10};

  std::string evaluator = "phylo";  // phylo | planted
  PMode p_mode = PMode::Percent;
  std::string planted;              // planted word for the synthetic oracle
  double noise = 0.0;
  std::uint64_t oracle_seed = 0;
  std::filesystem::path cache;      // optional persistent memo cache

  std::filesystem::path fasta;
  std::filesystem::path partitions;
  std::string outgroup;
  std::size_t replicates = 100;
  std::uint64_t bootstrap_seed = 1;
  GapMode gap_mode = GapMode::Pairwise;
  std::string external_command;     // `{input}` / `{output}` placeholders

  PipelineConfig pipeline;

  Method method = Method::Bpso2;
  std::size_t swarms = 1;
  std::size_t reps = 1;
  Transport transport = Transport::Local;
  std::size_t workers = 0;          // 0: one per particle
  std::vector<std::string> hosts;   // host:port of running serve-worker processes
  std::uint16_t port = 7700;
  std::size_t jobs = 1;             // runs executed concurrently

  std::filesystem::path report_dir = "results";
  std::string instance;             // label in summaries; defaults to the FASTA stem

  /// Particle count used by swarm s (0-based).
  std::size_t particles_for(std::size_t swarm) const { return particle_counts[swarm % particle_counts.size()]; }
  std::string instance_name() const;
};

/// Applies one `key = value` assignment; throws ConfigError naming the key.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value,
                   const std::filesystem::path& base_dir = {});
/// `key=value` form used by --set.
void apply_override(RunConfig& cfg, const std::string& assignment);

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {},
                       const std::string& source = "config");
RunConfig load_config(const std::filesystem::path& path);

/// Cross-field checks; throws ConfigError.
void validate(const RunConfig& cfg);

/// Every recognised key, sorted.
std::vector<std::string> config_keys();

/// Seed of repetition `rep` of swarm `swarm` derived from the base seed.
std::uint64_t run_seed(std::uint64_t base, std::size_t swarm, std::size_t rep);

}  // namespace phyloswarm
