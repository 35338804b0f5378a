#pragma once

// Append-only record of every evaluated word in a run. The file form is
// tab-separated, one line per result:
//   iteration  particle  word  b  p  fitness  topology_id
// preceded by `# key=value` header lines describing the run.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phyloswarm/bitspace.hpp"

namespace phyloswarm {

struct LedgerRecord {
  std::size_t iteration = 0;
  std::size_t particle = 0;
  BinaryPosition word;
  FitnessReport report;
  double wall_seconds = 0.0;  // in memory only

  /// Equal ignoring wall time.
  bool same_result(const LedgerRecord& other) const {
    return iteration == other.iteration && particle == other.particle && word == other.word &&
           report == other.report;
  }
};

class RunLedger {
 public:
  /// Free-form run description (run_id, method, swarm, rep, instance, N, ...).
  std::map<std::string, std::string> header;

  void append(LedgerRecord record);
  const std::vector<LedgerRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  /// Highest fitness; the earliest record wins ties.
  std::optional<LedgerRecord> best() const;

  std::string header_value(const std::string& key, const std::string& fallback = {}) const;

  void save(const std::filesystem::path& path) const;
  static RunLedger load(const std::filesystem::path& path);

 private:
  std::vector<LedgerRecord> records_;
};

}  // namespace phyloswarm
