#include <filesystem>
#include <string>

#include "doctest.h"
#include "phyloswarm/alignment.hpp"

using namespace phyloswarm;

namespace {

const char* kFasta =
    ">A\nACGTACGTACGTACGTACGT\n"
    ">B\nACGTACGTACGTACGTACGA\n"
    ">C\nACGTACGTTCGTACGTACGA\n"
    ">D\nACGTACGTTCGTAC-TACGA\n";

const char* kParts = "g1 = 1-12\ng2 = 13-20\n";

InputErrorCode code_of(const char* fasta, const char* parts) {
  try {
    parse_gene_matrix(fasta, parts);
  } catch (const InputError& e) {
    return e.code();
  }
  FAIL("no input error raised");
  return InputErrorCode::FileUnreadable;
}

}  // namespace

TEST_CASE("gene matrix from alignment and partitions") {
  const auto m = parse_gene_matrix(kFasta, kParts);
  CHECK(m.taxon_count() == 4);
  CHECK(m.gene_count() == 2);
  CHECK(m.total_width() == 20);
  CHECK(m.genes()[0].name == "g1");
  CHECK(m.genes()[0].block.width() == 12);
  CHECK(m.genes()[1].block.rows[3] == "AC-TACGA");
  CHECK(m.outgroup_name() == "A");
  CHECK(m.find_gene("g2") == 1u);
  CHECK_FALSE(m.find_gene("g3"));
}

TEST_CASE("genes are ordered by name") {
  const auto m = parse_gene_matrix(kFasta, "zeta = 1-12\nalpha = 13-20\n");
  CHECK(m.genes()[0].name == "alpha");
  CHECK(m.genes()[0].block.width() == 8);
  CHECK(m.genes()[1].name == "zeta");
}

TEST_CASE("outgroup selection") {
  CHECK(parse_gene_matrix(kFasta, kParts, std::string("C")).outgroup() == 2);
  CHECK_THROWS_AS(parse_gene_matrix(kFasta, kParts, std::string("Z")), InputError);
}

TEST_CASE("input errors carry distinct codes") {
  CHECK(code_of(kFasta, "g1 = 1-12\ng2 = 12-20\n") == InputErrorCode::PartitionOverlap);
  CHECK(code_of(kFasta, "g1 = 1-12\ng2 = 14-20\n") == InputErrorCode::PartitionGap);
  CHECK(code_of(kFasta, "g1 = 1-12\n") == InputErrorCode::PartitionGap);
  CHECK(code_of(kFasta, "g1 = 1-12\ng2 = 13-21\n") == InputErrorCode::PartitionOutOfRange);
  CHECK(code_of(kFasta, "g1 = 1-12\ng2 = 20-13\n") == InputErrorCode::EmptyPartition);
  CHECK(code_of(kFasta, "g1 = 1-12\ng1 = 13-20\n") == InputErrorCode::DuplicateGene);
  CHECK(code_of(kFasta, "g1 1-12\n") == InputErrorCode::MalformedPartition);
  CHECK(code_of(kFasta, "") == InputErrorCode::MalformedPartition);
  CHECK(code_of(">A\nACGT\n>A\nACGT\n", "g = 1-4\n") == InputErrorCode::DuplicateTaxon);
  CHECK(code_of(">A\nACGT\n>B\nACG\n", "g = 1-4\n") == InputErrorCode::RaggedRows);
  CHECK(code_of(">A\nACGT\n>B\nACGX\n", "g = 1-4\n") == InputErrorCode::UnknownCharacter);
  CHECK(code_of("ACGT\n>B\nACGT\n", "g = 1-4\n") == InputErrorCode::MalformedFasta);
  CHECK(code_of("", "g = 1-4\n") == InputErrorCode::MalformedFasta);
  CHECK_THROWS_AS(load_gene_matrix("/nonexistent/x.fasta", "/nonexistent/x.parts"), InputError);
}

TEST_CASE("concatenating selected genes") {
  const auto m = parse_gene_matrix(kFasta, kParts);
  CHECK(concat_subset(m, BinaryPosition::from_string("11")).width() == 20);
  const auto first = concat_subset(m, BinaryPosition::from_string("10"));
  CHECK(first.width() == 12);
  CHECK(first.rows == m.genes()[0].block.rows);
  const auto second = concat_subset(m, BinaryPosition::from_string("01"));
  CHECK(second.rows == m.genes()[1].block.rows);
  CHECK(concat_subset(m, BinaryPosition::from_string("11")).rows[0] == "ACGTACGTACGTACGTACGT");
  try {
    concat_subset(m, BinaryPosition::from_string("00"));
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(e.code() == InputErrorCode::EmptySubset);
  }
  try {
    concat_subset(m, BinaryPosition::from_string("111"));
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(e.code() == InputErrorCode::DimensionMismatch);
  }
}

TEST_CASE("matrix files round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "phyloswarm_alignment_test";
  std::filesystem::create_directories(dir);
  const auto m = parse_gene_matrix(kFasta, kParts);
  write_gene_matrix(m, dir / "m.fasta", dir / "m.parts");
  const auto again = load_gene_matrix(dir / "m.fasta", dir / "m.parts");
  CHECK(again.taxa() == m.taxa());
  REQUIRE(again.gene_count() == m.gene_count());
  for (std::size_t g = 0; g < m.gene_count(); ++g) {
    CHECK(again.genes()[g].name == m.genes()[g].name);
    CHECK(again.genes()[g].block.rows == m.genes()[g].block.rows);
  }
  std::filesystem::remove_all(dir);
}
