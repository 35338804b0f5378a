#include "phyloswarm/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <stdexcept>

namespace phyloswarm {

namespace {

constexpr std::array<char, 4> kBases{'A', 'C', 'G', 'T'};

std::pair<char, char> distinct_bases(RngStream& rng) {
  const auto first = rng.uniform_int(0, 3);
  const auto offset = rng.uniform_int(1, 3);
  return {kBases[first], kBases[(first + offset) % 4]};
}

// Real chloroplast gene names, already in lexicographic order.
constexpr std::array<const char*, 20> kGeneNames{
    "atpA", "atpB", "atpE", "matK", "ndhA", "ndhF", "petA", "psaA", "psaB", "psbA",
    "psbB", "psbC", "rbcL", "rpl2", "rpoA", "rpoB", "rpoC1", "rps3", "ycf1", "ycf2"};

std::string gene_name(std::size_t index, std::size_t total) {
  if (total <= kGeneNames.size()) return kGeneNames[index];
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "gene%03zu", index);
  return buffer;
}

}  // namespace

AlignedBlock simulate_gene(std::size_t taxon_count, const GeneRecipe& recipe, RngStream& rng) {
  std::vector<std::string> columns;
  for (const auto& split : recipe.splits) {
    for (std::size_t c = 0; c < split.columns; ++c) {
      auto [inside, outside] = distinct_bases(rng);
      std::string column(taxon_count, outside);
      for (std::size_t t : split.side) column.at(t) = inside;
      columns.push_back(std::move(column));
    }
  }
  for (std::size_t t = 0; t < taxon_count; ++t) {
    for (std::size_t c = 0; c < recipe.singleton_columns; ++c) {
      auto [inside, outside] = distinct_bases(rng);
      std::string column(taxon_count, outside);
      column[t] = inside;
      columns.push_back(std::move(column));
    }
  }
  for (std::size_t c = 0; c < recipe.constant_columns; ++c) {
    columns.emplace_back(taxon_count, kBases[rng.uniform_int(0, 3)]);
  }
  // Fisher-Yates with our own stream so the layout is reproducible.
  for (std::size_t i = columns.size(); i > 1; --i) {
    std::swap(columns[i - 1], columns[rng.uniform_int(0, i - 1)]);
  }
  AlignedBlock block;
  block.rows.assign(taxon_count, std::string());
  for (const auto& column : columns) {
    for (std::size_t t = 0; t < taxon_count; ++t) block.rows[t] += column[t];
  }
  return block;
}

BinaryPosition word_without(std::size_t size, std::size_t gene) {
  BinaryPosition w = BinaryPosition::all_ones(size);
  w.set(gene, false);
  return w;
}

BlurringFixture make_blurring_fixture(const BlurringFixtureOptions& options) {
  if (options.taxa < 4) throw std::invalid_argument("blurring fixture needs at least 4 taxa");
  if (options.genes < 2) throw std::invalid_argument("blurring fixture needs at least 2 genes");
  if (options.blurring_gene && *options.blurring_gene >= options.genes) {
    throw std::invalid_argument("blurring gene index out of range");
  }
  std::vector<std::string> taxa;
  for (std::size_t t = 0; t < options.taxa; ++t) {
    char buffer[16];
    std::snprintf(buffer, sizeof buffer, "t%02zu", t + 1);
    taxa.emplace_back(buffer);
  }

  // Caterpillar splits {0,1}, {0,1,2}, ..., {0..n-3}.
  auto caterpillar = [&](bool swap_second_third) {
    std::vector<SplitColumns> splits;
    for (std::size_t size = 2; size + 2 <= options.taxa; ++size) {
      SplitColumns split;
      for (std::size_t t = 0; t < size; ++t) split.side.push_back(t);
      if (swap_second_third && size == 2) split.side = {0, 2};
      split.columns = options.columns_per_split;
      splits.push_back(std::move(split));
    }
    return splits;
  };

  const std::size_t concordant_genes = options.genes - (options.blurring_gene ? 1 : 0);
  const std::size_t conflict =
      options.conflict_columns ? options.conflict_columns : options.columns_per_split * concordant_genes;

  RngStream rng(options.seed);
  std::vector<Gene> genes;
  for (std::size_t g = 0; g < options.genes; ++g) {
    GeneRecipe recipe;
    recipe.name = gene_name(g, options.genes);
    const bool blurring = options.blurring_gene == g;
    recipe.splits = caterpillar(blurring);
    if (blurring) recipe.splits.front().columns = conflict;
    recipe.singleton_columns = options.singleton_columns;
    recipe.constant_columns = options.constant_columns + g;
    RngStream gene_rng = rng.split(g);
    genes.push_back({recipe.name, simulate_gene(options.taxa, recipe, gene_rng)});
  }
  return BlurringFixture{GeneMatrix(std::move(taxa), std::move(genes), 0), options.blurring_gene};
}

}  // namespace phyloswarm
