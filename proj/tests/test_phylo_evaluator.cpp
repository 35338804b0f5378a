#include <memory>
#include <string>

#include "doctest.h"
#include "phyloswarm/phylo_evaluator.hpp"
#include "phyloswarm/synthetic.hpp"

using namespace phyloswarm;

namespace {

std::shared_ptr<const GeneMatrix> fixture_matrix(std::optional<std::size_t> blurring) {
  BlurringFixtureOptions options;
  options.blurring_gene = blurring;
  return std::make_shared<const GeneMatrix>(make_blurring_fixture(options).matrix);
}

}  // namespace

TEST_CASE("concordant genes score full marks") {
  PhyloEvaluator ev(fixture_matrix(std::nullopt), PhyloSettings{});
  const auto r = ev.evaluate(BinaryPosition::all_ones(10));
  CHECK(r.b == 100.0);
  CHECK(r.p == 100.0);
  CHECK(r.fitness == 100.0);
  CHECK(r.topology_id.size() == 16);
  CHECK(r.topology_id == topology_signature(ev.infer(BinaryPosition::all_ones(10))).id());
}

TEST_CASE("a discordant gene lowers support until it is removed") {
  const auto fixture = make_blurring_fixture();
  REQUIRE(fixture.blurring_gene);
  PhyloEvaluator ev(std::make_shared<const GeneMatrix>(fixture.matrix), PhyloSettings{});
  const auto all = ev.evaluate(BinaryPosition::all_ones(10));
  const auto without = ev.evaluate(word_without(10, *fixture.blurring_gene));
  CHECK(all.b < 100.0);
  CHECK(without.b == 100.0);
  CHECK(without.fitness > all.fitness);
  CHECK(without.p == doctest::Approx(90.0));
  CHECK(fixture.matrix.genes()[*fixture.blurring_gene].name == "petA");
}

TEST_CASE("empty selection scores zero") {
  PhyloEvaluator ev(fixture_matrix(6), PhyloSettings{});
  const auto r = ev.evaluate(BinaryPosition::all_zeros(10));
  CHECK(r.b == 0.0);
  CHECK(r.p == 0.0);
  CHECK(r.fitness == 0.0);
  CHECK_FALSE(r.has_topology());
  CHECK_THROWS_AS(ev.evaluate(BinaryPosition::all_ones(9)), InputError);
}

TEST_CASE("evaluation is deterministic") {
  const auto matrix = fixture_matrix(6);
  PhyloEvaluator a(matrix, PhyloSettings{50, 3});
  PhyloEvaluator b(matrix, PhyloSettings{50, 3});
  for (const char* text : {"1111111111", "1010101010", "1111110111", "0000001000"}) {
    const auto w = BinaryPosition::from_string(text);
    CHECK(a.evaluate(w) == b.evaluate(w));
    CHECK(a.evaluate(w) == evaluate_phylo(*matrix, w, 50, 3));
  }
}

TEST_CASE("count mode uses the number of genes") {
  PhyloEvaluator ev(fixture_matrix(std::nullopt), PhyloSettings{20, 1, PMode::Count});
  const auto r = ev.evaluate(BinaryPosition::from_string("1111100000"));
  CHECK(r.p == 5.0);
  CHECK(r.fitness == doctest::Approx((r.b + 5.0) / 2.0));
}

TEST_CASE("too few taxa") {
  const auto m = std::make_shared<const GeneMatrix>(parse_gene_matrix(">A\nAC\n>B\nAG\n", "g = 1-2\n"));
  CHECK_THROWS_AS(PhyloEvaluator(m, PhyloSettings{}), InputError);
}

TEST_CASE("external tree builder") {
  const auto matrix = fixture_matrix(std::nullopt);
  const auto reference = PhyloEvaluator(matrix, PhyloSettings{}).infer(BinaryPosition::all_ones(10));
  auto annotated = reference;
  double s = 60.0;
  for (std::size_t e : annotated.internal_edges()) annotated.mutable_edges()[e].support = s++;
  const std::string newick = to_newick(annotated);
  ExternalEvaluator ev(matrix, "test -s {input} && printf '%s' '" + newick + "' > {output}");
  const auto r = ev.evaluate(BinaryPosition::all_ones(10));
  CHECK(r.b == 60.0);
  CHECK(r.p == 100.0);
  CHECK(r.topology_id == topology_signature(reference).id());

  ExternalEvaluator failing(matrix, "false {output}");
  CHECK_THROWS_AS(failing.evaluate(BinaryPosition::all_ones(10)), std::runtime_error);
  CHECK_THROWS_AS(ExternalEvaluator(matrix, "cat {input}"), std::invalid_argument);
}
