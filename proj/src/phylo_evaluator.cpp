#include "phyloswarm/phylo_evaluator.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

namespace phyloswarm {

PhyloEvaluator::PhyloEvaluator(std::shared_ptr<const GeneMatrix> matrix, PhyloSettings settings)
    : matrix_(std::move(matrix)), settings_(settings) {
  if (!matrix_) throw std::invalid_argument("phylo evaluator needs a gene matrix");
  if (matrix_->taxon_count() < 3) throw InputError(InputErrorCode::TooFewTaxa, "at least 3 taxa required");
  if (settings_.replicates == 0) throw std::invalid_argument("phylo evaluator needs at least one replicate");
}

UnrootedTree PhyloEvaluator::infer(const BinaryPosition& w) const {
  return bootstrap_support(concat_subset(*matrix_, w), matrix_->taxa(), settings_.replicates, settings_.seed,
                           settings_.gap_mode);
}

FitnessReport PhyloEvaluator::evaluate(const BinaryPosition& w) const {
  if (w.size() != matrix_->gene_count()) {
    throw InputError(InputErrorCode::DimensionMismatch, "word length does not match gene count");
  }
  if (w.ones_count() == 0) return FitnessReport{};
  const UnrootedTree tree = infer(w);
  return make_report(lowest_support(tree), inclusion_score(w, settings_.p_mode), topology_signature(tree).id());
}

FitnessReport evaluate_phylo(const GeneMatrix& matrix, const BinaryPosition& w, std::size_t replicates,
                             std::uint64_t seed, PMode p_mode) {
  const PhyloEvaluator evaluator(std::make_shared<const GeneMatrix>(matrix),
                                 PhyloSettings{replicates, seed, p_mode, GapMode::Pairwise});
  return evaluator.evaluate(w);
}

ExternalEvaluator::ExternalEvaluator(std::shared_ptr<const GeneMatrix> matrix, std::string command_template,
                                     PMode p_mode)
    : matrix_(std::move(matrix)), command_template_(std::move(command_template)), p_mode_(p_mode) {
  if (!matrix_) throw std::invalid_argument("external evaluator needs a gene matrix");
  if (command_template_.find("{output}") == std::string::npos) {
    throw std::invalid_argument("external evaluator command must mention {output}");
  }
}

namespace {

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
  for (std::size_t pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size())) {
    text.replace(pos, from.size(), to);
  }
  return text;
}

std::filesystem::path scratch_path(const std::string& suffix) {
  static std::atomic<std::uint64_t> counter{0};
  return std::filesystem::temp_directory_path() /
         ("phyloswarm-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + suffix);
}

}  // namespace

FitnessReport ExternalEvaluator::evaluate(const BinaryPosition& w) const {
  if (w.size() != matrix_->gene_count()) {
    throw InputError(InputErrorCode::DimensionMismatch, "word length does not match gene count");
  }
  if (w.ones_count() == 0) return FitnessReport{};
  const auto input = scratch_path(".fasta");
  const auto output = scratch_path(".nwk");
  write_fasta(matrix_->taxa(), concat_subset(*matrix_, w), input);
  std::string command = replace_all(command_template_, "{input}", input.string());
  command = replace_all(command, "{output}", output.string());
  const int status = std::system(command.c_str());
  std::filesystem::remove(input);
  if (status != 0) {
    std::filesystem::remove(output);
    throw std::runtime_error("external evaluator command failed (" + std::to_string(status) + "): " + command);
  }
  std::ifstream in(output);
  if (!in) throw std::runtime_error("external evaluator produced no tree at " + output.string());
  std::stringstream text;
  text << in.rdbuf();
  in.close();
  std::filesystem::remove(output);
  const UnrootedTree tree = parse_newick(text.str(), matrix_->taxa());
  return make_report(lowest_support(tree), inclusion_score(w, p_mode_), topology_signature(tree).id());
}

}  // namespace phyloswarm
