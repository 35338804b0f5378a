#pragma once

// Command-line front end. Each verb is callable directly so tests can drive
// it without spawning processes.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "phyloswarm/alignment.hpp"
#include "phyloswarm/config.hpp"
#include "phyloswarm/fitness.hpp"
#include "phyloswarm/report.hpp"

namespace phyloswarm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInput = 3;

/// The configured evaluator wrapped in a memo cache shared by every run of
/// one command.
class EvaluatorBundle {
 public:
  /// Throws InputError for unreadable or inconsistent instance files.
  explicit EvaluatorBundle(const RunConfig& cfg);

  const FitnessEvaluator& evaluator() const { return *memoized_; }
  std::size_t instance_size() const { return base_->instance_size(); }
  const std::shared_ptr<MemoCache>& cache() const { return cache_; }
  /// Newick text of the reference tree for w, when the evaluator builds one.
  std::optional<std::string> newick(const BinaryPosition& w) const;

 private:
  std::shared_ptr<const GeneMatrix> matrix_;
  std::unique_ptr<FitnessEvaluator> base_;
  std::shared_ptr<MemoCache> cache_;
  std::unique_ptr<MemoizedEvaluator> memoized_;
  bool builds_trees_ = false;
};

struct RunOutput {
  std::vector<RunSummary> summaries;
  std::vector<RunLedger> ledgers;
};

/// Runs every swarm x repetition, writing ledgers, summary, Newick trees and
/// tables under cfg.report_dir.
RunOutput execute_runs(const RunConfig& cfg, const EvaluatorBundle& bundle, std::ostream& log);

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int report_command(const std::vector<std::filesystem::path>& result_dirs, const std::filesystem::path& out_dir,
                   std::ostream& out, std::ostream& err);
int evaluate_command(const RunConfig& cfg, const std::string& word, std::ostream& out, std::ostream& err);
int serve_worker_command(const RunConfig& cfg, std::size_t max_connections, std::ostream& out, std::ostream& err);

/// Loads ledgers (ledgers/*.tsv, sorted by name) from a result directory.
std::vector<RunLedger> load_ledgers(const std::filesystem::path& result_dir);

/// Full argument handling; argv[0] is the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace phyloswarm
