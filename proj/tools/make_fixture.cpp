// Writes the synthetic blurring-gene instance: FASTA, partitions and a
// ready-to-run configuration.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "phyloswarm/synthetic.hpp"

int main(int argc, char** argv) {
  phyloswarm::BlurringFixtureOptions options;
  std::string out_dir = "fixture";
  long blurring = 6;
  CLI::App app{"Generate a synthetic gene matrix with one discordant gene"};
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--taxa", options.taxa, "Number of taxa");
  app.add_option("--genes", options.genes, "Number of genes");
  app.add_option("--blurring-gene", blurring, "Index of the discordant gene (-1 for none)");
  app.add_option("--columns-per-split", options.columns_per_split, "Informative columns per split and gene");
  app.add_option("--seed", options.seed, "Generator seed");
  CLI11_PARSE(app, argc, argv);
  if (blurring < 0) {
    options.blurring_gene.reset();
  } else {
    options.blurring_gene = static_cast<std::size_t>(blurring);
  }

  try {
    const auto fixture = phyloswarm::make_blurring_fixture(options);
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    phyloswarm::write_gene_matrix(fixture.matrix, dir / "genes.fasta", dir / "genes.partitions");
    std::ofstream cfg(dir / "run.conf");
    cfg << "# synthetic instance: " << options.taxa << " taxa, " << options.genes << " genes";
    if (fixture.blurring_gene) cfg << ", discordant gene " << fixture.matrix.genes()[*fixture.blurring_gene].name;
    cfg << "\nphylo.fasta = genes.fasta\n"
        << "phylo.partitions = genes.partitions\n"
        << "phylo.outgroup = " << fixture.matrix.outgroup_name() << "\n"
        << "phylo.replicates = 100\n"
        << "fitness.p_mode = percent\n"
        << "engine.L = 10\n"
        << "engine.I_max = 100\n"
        << "engine.r_threshold_range = 0, 1\n"
        << "runtime.method = bpso2\n"
        << "runtime.swarms = 10\n"
        << "runtime.reps = 10\n"
        << "report.instance = blurring\n";
    std::cout << "wrote " << (dir / "genes.fasta").string() << ", " << (dir / "genes.partitions").string() << ", "
              << (dir / "run.conf").string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
