#pragma once

// Pre-aligned sequences split into named gene blocks. Loaded from a FASTA
// file of concatenated alignments plus a partition sidecar with lines
//   gene_name = start-end        (1-based, inclusive)
// Gene blocks are stored in lexicographic name order; that order is the
// bit order of every binary word used against the matrix.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "phyloswarm/bitspace.hpp"

namespace phyloswarm {

enum class InputErrorCode {
  FileUnreadable,
  MalformedFasta,
  DuplicateTaxon,
  RaggedRows,
  UnknownCharacter,
  MalformedPartition,
  DuplicateGene,
  EmptyPartition,
  PartitionOverlap,
  PartitionGap,
  PartitionOutOfRange,
  UnknownOutgroup,
  TooFewTaxa,
  EmptySubset,
  DimensionMismatch,
};

std::string_view to_string(InputErrorCode code) noexcept;

class InputError : public std::runtime_error {
 public:
  InputError(InputErrorCode code, const std::string& detail);
  InputErrorCode code() const noexcept { return code_; }

 private:
  InputErrorCode code_;
};

/// Rows of equal length, one per taxon, over {A,C,G,T,-}.
struct AlignedBlock {
  std::vector<std::string> rows;

  std::size_t taxon_count() const noexcept { return rows.size(); }
  std::size_t width() const noexcept { return rows.empty() ? 0 : rows.front().size(); }
};

struct Gene {
  std::string name;
  AlignedBlock block;
};

class GeneMatrix {
 public:
  GeneMatrix(std::vector<std::string> taxa, std::vector<Gene> genes, std::size_t outgroup = 0);

  const std::vector<std::string>& taxa() const noexcept { return taxa_; }
  const std::vector<Gene>& genes() const noexcept { return genes_; }
  std::size_t gene_count() const noexcept { return genes_.size(); }
  std::size_t taxon_count() const noexcept { return taxa_.size(); }
  std::size_t total_width() const noexcept;
  std::size_t outgroup() const noexcept { return outgroup_; }
  const std::string& outgroup_name() const { return taxa_.at(outgroup_); }

  std::optional<std::size_t> find_gene(std::string_view name) const;

 private:
  std::vector<std::string> taxa_;
  std::vector<Gene> genes_;
  std::size_t outgroup_;
};

/// Reads the FASTA and partition files. `outgroup` names a taxon; when absent
/// the first taxon in the FASTA file is used.
GeneMatrix load_gene_matrix(const std::filesystem::path& fasta, const std::filesystem::path& partitions,
                            std::optional<std::string> outgroup = std::nullopt);

/// Same as load_gene_matrix, from in-memory text.
GeneMatrix parse_gene_matrix(std::string_view fasta_text, std::string_view partition_text,
                             std::optional<std::string> outgroup = std::nullopt);

/// Writes the concatenated FASTA and a partition sidecar for the matrix.
void write_gene_matrix(const GeneMatrix& matrix, const std::filesystem::path& fasta,
                       const std::filesystem::path& partitions);

void write_fasta(const std::vector<std::string>& taxa, const AlignedBlock& block,
                 const std::filesystem::path& path);

/// Column-wise concatenation of the genes selected by w, in gene order.
AlignedBlock concat_subset(const GeneMatrix& matrix, const BinaryPosition& w);

}  // namespace phyloswarm
