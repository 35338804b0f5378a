#pragma once

// Result tables built from run ledgers and summaries. Every table is a pure
// function of its inputs and renders both as aligned text and as TSV.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "phyloswarm/bitspace.hpp"
#include "phyloswarm/ledger.hpp"

namespace phyloswarm {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string to_text() const;
  std::string to_tsv() const;
};

/// One finished run (one swarm repetition, or one GA pipeline).
struct RunSummary {
  std::string instance;
  std::string method;  // bpso1 | bpso2 | ga
  std::size_t particles = 0;
  std::size_t swarm = 0;  // 1-based
  std::size_t rep = 0;    // 1-based
  std::uint64_t seed = 0;
  std::size_t N = 0;
  std::size_t evaluations = 0;  // evaluated trees, repeats included
  std::size_t unique_words = 0;
  std::size_t iterations = 0;   // BPSO iterations after initialization
  int terminus = 0;             // GA only
  BinaryPosition best_word;
  FitnessReport best;

  bool operator==(const RunSummary&) const = default;
};

void save_summaries(const std::filesystem::path& path, const std::vector<RunSummary>& summaries);
std::vector<RunSummary> load_summaries(const std::filesystem::path& path);

/// Per topology: swarms it appeared in, b/p/F of its best tree, and how many
/// evaluated trees had it. Sorted by F, then occurrences, both descending.
Table topology_table(const std::vector<RunLedger>& ledgers);

/// Per swarm: genes removed from its best word, F and b.
Table best_per_swarm_table(const std::vector<RunLedger>& ledgers);

/// Rows are instances, columns method x particle count, cells the b of the
/// best word found. Missing combinations print "-".
Table compare_methods(const std::vector<RunSummary>& summaries);

}  // namespace phyloswarm
