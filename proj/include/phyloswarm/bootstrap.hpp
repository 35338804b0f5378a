#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "phyloswarm/alignment.hpp"
#include "phyloswarm/rng.hpp"
#include "phyloswarm/tree.hpp"

namespace phyloswarm {

/// Pairwise deletion compares each pair on the columns where neither has a
/// gap; complete deletion first drops every column containing a gap.
enum class GapMode { Pairwise, Complete };

std::string_view to_string(GapMode mode) noexcept;
GapMode parse_gap_mode(std::string_view text);

/// Share of differing characters over the columns where both rows are
/// non-gap; 0 when no column is comparable.
double p_distance(const AlignedBlock& block, std::size_t taxon_i, std::size_t taxon_j);

DistanceMatrix distance_matrix(const AlignedBlock& block, GapMode mode = GapMode::Pairwise);

/// The alignment compressed to distinct columns. Distances are computed
/// from per-pattern weights, which makes resampling cheap.
class SitePatterns {
 public:
  SitePatterns(const AlignedBlock& block, GapMode mode);

  std::size_t taxon_count() const noexcept { return taxa_; }
  /// Columns left after gap filtering.
  std::size_t width() const noexcept { return column_pattern_.size(); }
  std::size_t pattern_count() const noexcept { return comparable_.size(); }
  std::span<const std::uint32_t> column_patterns() const noexcept { return column_pattern_; }
  /// How often each pattern occurs in the (filtered) alignment.
  std::vector<double> original_weights() const;

  DistanceMatrix distances(std::span<const double> weights) const;

 private:
  std::size_t taxa_;
  std::size_t pairs_;
  std::vector<std::uint32_t> column_pattern_;
  // Per pattern, one flag per taxon pair (i < j) in row-major order.
  std::vector<std::vector<std::uint8_t>> comparable_;
  std::vector<std::vector<std::uint8_t>> differs_;
};

/// Pattern weights of one bootstrap replicate: `width` columns drawn with
/// replacement from the patterns' columns.
std::vector<double> resample_weights(const SitePatterns& patterns, RngStream& rng);

/// Support as a rounded-half-up integer percentage of count / replicates.
double support_percent(std::size_t count, std::size_t replicates);

/// Reference NJ tree of the block with per-internal-edge bootstrap supports
/// from `replicates` column resamples. Replicate r draws from the substream
/// split(r) of `seed`.
UnrootedTree bootstrap_support(const AlignedBlock& block, const std::vector<std::string>& taxa,
                               std::size_t replicates, std::uint64_t seed, GapMode mode = GapMode::Pairwise);

/// Support counts of the reference tree's edges against a given replicate
/// set of pattern weights; exposed for testing.
UnrootedTree annotate_supports(UnrootedTree reference, const SitePatterns& patterns,
                               std::span<const std::vector<double>> replicate_weights);

/// Minimum support over internal edges; 100 when the tree has none.
double lowest_support(const UnrootedTree& tree);

}  // namespace phyloswarm
