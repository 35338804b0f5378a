#pragma once

// Synthetic alignments with known signal. Each gene is assembled from
// columns that each support exactly one bipartition, so the p-distance of
// any column resample is an additive tree metric and neighbor joining
// recovers the generating topology whenever every split keeps a column.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phyloswarm/alignment.hpp"
#include "phyloswarm/rng.hpp"

namespace phyloswarm {

struct SplitColumns {
  std::vector<std::size_t> side;  // taxa on one side of the bipartition
  std::size_t columns = 0;
};

struct GeneRecipe {
  std::string name;
  std::vector<SplitColumns> splits;
  std::size_t singleton_columns = 0;  // per taxon
  std::size_t constant_columns = 0;
};

AlignedBlock simulate_gene(std::size_t taxon_count, const GeneRecipe& recipe, RngStream& rng);

struct BlurringFixtureOptions {
  std::size_t taxa = 8;
  std::size_t genes = 10;
  /// Index (in sorted gene order) of the discordant gene; none gives a
  /// fully concordant matrix.
  std::optional<std::size_t> blurring_gene = 6;
  std::size_t columns_per_split = 3;
  /// Columns the discordant gene spends on its conflicting split; 0 means
  /// as many as the concordant genes spend together on the split it contradicts.
  std::size_t conflict_columns = 0;
  std::size_t singleton_columns = 2;
  std::size_t constant_columns = 10;
  std::uint64_t seed = 7;
};

struct BlurringFixture {
  GeneMatrix matrix;
  std::optional<std::size_t> blurring_gene;
};

/// Caterpillar species tree (t1,(t2,(t3,...))). Concordant genes carry
/// columns for every split of it; the discordant gene swaps the second and
/// third taxa, so it contradicts the cherry {t1,t2} and agrees elsewhere.
BlurringFixture make_blurring_fixture(const BlurringFixtureOptions& options = {});

/// Every word of the fixture's size except the discordant gene.
BinaryPosition word_without(std::size_t size, std::size_t gene);

}  // namespace phyloswarm
