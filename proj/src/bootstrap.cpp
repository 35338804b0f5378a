#include "phyloswarm/bootstrap.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>

#include "phyloswarm/rng.hpp"

namespace phyloswarm {

std::string_view to_string(GapMode mode) noexcept {
  return mode == GapMode::Pairwise ? "pairwise" : "complete";
}

GapMode parse_gap_mode(std::string_view text) {
  if (text == "pairwise") return GapMode::Pairwise;
  if (text == "complete") return GapMode::Complete;
  throw std::invalid_argument("gap mode must be 'pairwise' or 'complete', got '" + std::string(text) + "'");
}

double p_distance(const AlignedBlock& block, std::size_t taxon_i, std::size_t taxon_j) {
  if (block.width() == 0) throw std::invalid_argument("p_distance: empty block");
  const std::string& a = block.rows.at(taxon_i);
  const std::string& b = block.rows.at(taxon_j);
  std::size_t comparable = 0, mismatches = 0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    if (a[c] == '-' || b[c] == '-') continue;
    ++comparable;
    if (a[c] != b[c]) ++mismatches;
  }
  return comparable == 0 ? 0.0 : static_cast<double>(mismatches) / static_cast<double>(comparable);
}

DistanceMatrix distance_matrix(const AlignedBlock& block, GapMode mode) {
  const SitePatterns patterns(block, mode);
  return patterns.distances(patterns.original_weights());
}

SitePatterns::SitePatterns(const AlignedBlock& block, GapMode mode)
    : taxa_(block.taxon_count()), pairs_(taxa_ * (taxa_ - (taxa_ > 0 ? 1 : 0)) / 2) {
  std::map<std::string, std::uint32_t> index;
  std::string column(taxa_, ' ');
  for (std::size_t c = 0; c < block.width(); ++c) {
    bool has_gap = false;
    for (std::size_t t = 0; t < taxa_; ++t) {
      column[t] = block.rows[t][c];
      has_gap = has_gap || column[t] == '-';
    }
    if (mode == GapMode::Complete && has_gap) continue;
    auto [it, inserted] = index.try_emplace(column, static_cast<std::uint32_t>(comparable_.size()));
    if (inserted) {
      std::vector<std::uint8_t> comparable(pairs_), differs(pairs_);
      std::size_t k = 0;
      for (std::size_t i = 0; i < taxa_; ++i) {
        for (std::size_t j = i + 1; j < taxa_; ++j, ++k) {
          comparable[k] = column[i] != '-' && column[j] != '-';
          differs[k] = comparable[k] && column[i] != column[j];
        }
      }
      comparable_.push_back(std::move(comparable));
      differs_.push_back(std::move(differs));
    }
    column_pattern_.push_back(it->second);
  }
}

std::vector<double> SitePatterns::original_weights() const {
  std::vector<double> weights(pattern_count(), 0.0);
  for (auto p : column_pattern_) weights[p] += 1.0;
  return weights;
}

DistanceMatrix SitePatterns::distances(std::span<const double> weights) const {
  if (weights.size() != pattern_count()) throw std::invalid_argument("pattern weight count mismatch");
  std::vector<double> compared(pairs_, 0.0), different(pairs_, 0.0);
  for (std::size_t p = 0; p < weights.size(); ++p) {
    if (weights[p] == 0.0) continue;
    for (std::size_t k = 0; k < pairs_; ++k) {
      compared[k] += weights[p] * comparable_[p][k];
      different[k] += weights[p] * differs_[p][k];
    }
  }
  DistanceMatrix d(taxa_);
  std::size_t k = 0;
  for (std::size_t i = 0; i < taxa_; ++i) {
    for (std::size_t j = i + 1; j < taxa_; ++j, ++k) {
      d.set(i, j, compared[k] == 0.0 ? 0.0 : different[k] / compared[k]);
    }
  }
  return d;
}

std::vector<double> resample_weights(const SitePatterns& patterns, RngStream& rng) {
  std::vector<double> weights(patterns.pattern_count(), 0.0);
  const auto columns = patterns.column_patterns();
  if (columns.empty()) return weights;
  for (std::size_t draw = 0; draw < columns.size(); ++draw) {
    weights[columns[rng.uniform_int(0, columns.size() - 1)]] += 1.0;
  }
  return weights;
}

double support_percent(std::size_t count, std::size_t replicates) {
  if (replicates == 0) throw std::invalid_argument("support_percent: zero replicates");
  return static_cast<double>((200 * count + replicates) / (2 * replicates));
}

UnrootedTree annotate_supports(UnrootedTree reference, const SitePatterns& patterns,
                               std::span<const std::vector<double>> replicate_weights) {
  const std::vector<std::size_t> internal = reference.internal_edges();
  std::vector<Split> reference_splits;
  for (std::size_t e : internal) reference_splits.push_back(reference.split_of(e));
  std::vector<std::size_t> counts(internal.size(), 0);
  for (const auto& weights : replicate_weights) {
    const std::set<Split> found = neighbor_joining(patterns.distances(weights), reference.taxa()).splits();
    for (std::size_t k = 0; k < internal.size(); ++k) counts[k] += found.contains(reference_splits[k]) ? 1 : 0;
  }
  for (std::size_t k = 0; k < internal.size(); ++k) {
    reference.mutable_edges()[internal[k]].support = support_percent(counts[k], replicate_weights.size());
  }
  return reference;
}

UnrootedTree bootstrap_support(const AlignedBlock& block, const std::vector<std::string>& taxa,
                               std::size_t replicates, std::uint64_t seed, GapMode mode) {
  if (block.width() == 0) throw std::invalid_argument("bootstrap: empty block");
  if (replicates == 0) throw std::invalid_argument("bootstrap: at least one replicate required");
  if (block.taxon_count() != taxa.size()) throw std::invalid_argument("bootstrap: taxa/row count mismatch");
  const SitePatterns patterns(block, mode);
  UnrootedTree reference = neighbor_joining(patterns.distances(patterns.original_weights()), taxa);

  const RngStream root(seed);
  std::vector<std::vector<double>> replicate_weights;
  replicate_weights.reserve(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    RngStream stream = root.split(r);
    replicate_weights.push_back(resample_weights(patterns, stream));
  }
  return annotate_supports(std::move(reference), patterns, replicate_weights);
}

double lowest_support(const UnrootedTree& tree) {
  double lowest = 100.0;
  for (std::size_t e : tree.internal_edges()) {
    const auto& support = tree.edges()[e].support;
    if (!support) throw std::invalid_argument("lowest_support: internal edge without support");
    lowest = std::min(lowest, *support);
  }
  return lowest;
}

}  // namespace phyloswarm
