#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>

#include "phyloswarm/alignment.hpp"
#include "phyloswarm/bootstrap.hpp"
#include "phyloswarm/fitness.hpp"
#include "phyloswarm/tree.hpp"

namespace phyloswarm {

struct PhyloSettings {
  std::size_t replicates = 100;
  std::uint64_t seed = 1;
  PMode p_mode = PMode::Percent;
  GapMode gap_mode = GapMode::Pairwise;
};

/// Scores a gene subset by the lowest bootstrap support of the NJ tree
/// inferred from the concatenated selected genes. The bootstrap seed is
/// fixed, so the landscape does not move during a run.
class PhyloEvaluator final : public FitnessEvaluator {
 public:
  PhyloEvaluator(std::shared_ptr<const GeneMatrix> matrix, PhyloSettings settings);

  /// All-zero words score b = p = F = 0 with no topology.
  FitnessReport evaluate(const BinaryPosition& w) const override;
  std::size_t instance_size() const override { return matrix_->gene_count(); }

  /// Reference tree with supports; throws InputError for an all-zero word.
  UnrootedTree infer(const BinaryPosition& w) const;

  const GeneMatrix& matrix() const noexcept { return *matrix_; }
  const PhyloSettings& settings() const noexcept { return settings_; }

 private:
  std::shared_ptr<const GeneMatrix> matrix_;
  PhyloSettings settings_;
};

FitnessReport evaluate_phylo(const GeneMatrix& matrix, const BinaryPosition& w, std::size_t replicates,
                             std::uint64_t seed, PMode p_mode = PMode::Percent);

/// Delegates tree inference to an external program. The command template's
/// `{input}` is replaced by the path of a FASTA file holding the selected
/// genes and `{output}` by the path where the program must leave a Newick
/// tree with support values.
class ExternalEvaluator final : public FitnessEvaluator {
 public:
  ExternalEvaluator(std::shared_ptr<const GeneMatrix> matrix, std::string command_template,
                    PMode p_mode = PMode::Percent);

  FitnessReport evaluate(const BinaryPosition& w) const override;
  std::size_t instance_size() const override { return matrix_->gene_count(); }

 private:
  std::shared_ptr<const GeneMatrix> matrix_;
  std::string command_template_;
  PMode p_mode_;
};

}  // namespace phyloswarm
