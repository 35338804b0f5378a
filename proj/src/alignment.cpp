#include "phyloswarm/alignment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace phyloswarm {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(InputErrorCode::FileUnreadable, path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool valid_residue(char c) { return c == 'A' || c == 'C' || c == 'G' || c == 'T' || c == '-'; }

struct FastaRecord {
  std::string name;
  std::string sequence;
};

std::vector<FastaRecord> parse_fasta(std::string_view text) {
  std::vector<FastaRecord> records;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '>') {
      view.remove_prefix(1);
      view = trim(view);
      std::string name(view.substr(0, view.find_first_of(" \t")));
      if (name.empty()) {
        throw InputError(InputErrorCode::MalformedFasta, "empty header at line " + std::to_string(line_no));
      }
      if (!seen.insert(name).second) throw InputError(InputErrorCode::DuplicateTaxon, name);
      records.push_back({std::move(name), {}});
      continue;
    }
    if (records.empty()) {
      throw InputError(InputErrorCode::MalformedFasta, "sequence data before first header");
    }
    for (char raw : view) {
      if (std::isspace(static_cast<unsigned char>(raw))) continue;
      const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(raw)));
      if (!valid_residue(c)) {
        throw InputError(InputErrorCode::UnknownCharacter,
                         std::string("'") + raw + "' in taxon " + records.back().name);
      }
      records.back().sequence.push_back(c);
    }
  }
  if (records.empty()) throw InputError(InputErrorCode::MalformedFasta, "no sequences");
  const std::size_t width = records.front().sequence.size();
  for (const auto& r : records) {
    if (r.sequence.size() != width) {
      throw InputError(InputErrorCode::RaggedRows, r.name + " has " + std::to_string(r.sequence.size()) +
                                                       " columns, expected " + std::to_string(width));
    }
  }
  return records;
}

struct PartitionLine {
  std::string name;
  std::size_t start = 0;  // 1-based inclusive
  std::size_t end = 0;
};

std::size_t parse_position(std::string_view text, const std::string& context) {
  text = trim(text);
  std::size_t value = 0;
  auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc{} || result.ptr != text.data() + text.size() || text.empty()) {
    throw InputError(InputErrorCode::MalformedPartition, context);
  }
  return value;
}

std::vector<PartitionLine> parse_partitions(std::string_view text) {
  std::vector<PartitionLine> parts;
  std::set<std::string> names;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    std::string_view line = trim(std::string_view(raw).substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw InputError(InputErrorCode::MalformedPartition, std::string(line));
    std::string_view name = trim(line.substr(0, eq));
    // Tolerate a RAxML-style model prefix: "DNA, gene = 1-100".
    if (auto comma = name.find(','); comma != std::string_view::npos) name = trim(name.substr(comma + 1));
    std::string_view range = trim(line.substr(eq + 1));
    const auto dash = range.find('-');
    if (name.empty() || dash == std::string_view::npos) {
      throw InputError(InputErrorCode::MalformedPartition, std::string(line));
    }
    PartitionLine part{std::string(name), parse_position(range.substr(0, dash), std::string(line)),
                       parse_position(range.substr(dash + 1), std::string(line))};
    if (!names.insert(part.name).second) throw InputError(InputErrorCode::DuplicateGene, part.name);
    if (part.start == 0 || part.end < part.start) {
      throw InputError(InputErrorCode::EmptyPartition, part.name);
    }
    parts.push_back(std::move(part));
  }
  if (parts.empty()) throw InputError(InputErrorCode::MalformedPartition, "no partitions");
  return parts;
}

}  // namespace

std::string_view to_string(InputErrorCode code) noexcept {
  switch (code) {
    case InputErrorCode::FileUnreadable: return "file-unreadable";
    case InputErrorCode::MalformedFasta: return "malformed-fasta";
    case InputErrorCode::DuplicateTaxon: return "duplicate-taxon";
    case InputErrorCode::RaggedRows: return "ragged-rows";
    case InputErrorCode::UnknownCharacter: return "unknown-character";
    case InputErrorCode::MalformedPartition: return "malformed-partition";
    case InputErrorCode::DuplicateGene: return "duplicate-gene";
    case InputErrorCode::EmptyPartition: return "empty-partition";
    case InputErrorCode::PartitionOverlap: return "partition-overlap";
    case InputErrorCode::PartitionGap: return "partition-gap";
    case InputErrorCode::PartitionOutOfRange: return "partition-out-of-range";
    case InputErrorCode::UnknownOutgroup: return "unknown-outgroup";
    case InputErrorCode::TooFewTaxa: return "too-few-taxa";
    case InputErrorCode::EmptySubset: return "empty-subset";
    case InputErrorCode::DimensionMismatch: return "dimension-mismatch";
  }
  return "unknown";
}

InputError::InputError(InputErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

GeneMatrix::GeneMatrix(std::vector<std::string> taxa, std::vector<Gene> genes, std::size_t outgroup)
    : taxa_(std::move(taxa)), genes_(std::move(genes)), outgroup_(outgroup) {
  if (outgroup_ >= taxa_.size()) throw InputError(InputErrorCode::UnknownOutgroup, "index out of range");
  std::set<std::string> unique_taxa(taxa_.begin(), taxa_.end());
  if (unique_taxa.size() != taxa_.size()) throw InputError(InputErrorCode::DuplicateTaxon, "in taxon list");
  std::sort(genes_.begin(), genes_.end(), [](const Gene& a, const Gene& b) { return a.name < b.name; });
  for (std::size_t g = 0; g < genes_.size(); ++g) {
    const Gene& gene = genes_[g];
    if (g > 0 && genes_[g - 1].name == gene.name) throw InputError(InputErrorCode::DuplicateGene, gene.name);
    if (gene.block.taxon_count() != taxa_.size()) {
      throw InputError(InputErrorCode::RaggedRows, "gene " + gene.name + " row count differs from taxa");
    }
    if (gene.block.width() == 0) throw InputError(InputErrorCode::EmptyPartition, gene.name);
    for (const auto& row : gene.block.rows) {
      if (row.size() != gene.block.width()) throw InputError(InputErrorCode::RaggedRows, "gene " + gene.name);
      for (char c : row) {
        if (!valid_residue(c)) throw InputError(InputErrorCode::UnknownCharacter, std::string(1, c));
      }
    }
  }
}

std::size_t GeneMatrix::total_width() const noexcept {
  std::size_t width = 0;
  for (const auto& g : genes_) width += g.block.width();
  return width;
}

std::optional<std::size_t> GeneMatrix::find_gene(std::string_view name) const {
  for (std::size_t g = 0; g < genes_.size(); ++g) {
    if (genes_[g].name == name) return g;
  }
  return std::nullopt;
}

GeneMatrix parse_gene_matrix(std::string_view fasta_text, std::string_view partition_text,
                             std::optional<std::string> outgroup) {
  std::vector<FastaRecord> records = parse_fasta(fasta_text);
  std::vector<PartitionLine> parts = parse_partitions(partition_text);
  const std::size_t width = records.front().sequence.size();

  std::vector<PartitionLine> by_start = parts;
  std::sort(by_start.begin(), by_start.end(),
            [](const PartitionLine& a, const PartitionLine& b) { return a.start < b.start; });
  std::size_t next = 1;
  for (const auto& part : by_start) {
    if (part.end > width) {
      throw InputError(InputErrorCode::PartitionOutOfRange,
                       part.name + " ends at " + std::to_string(part.end) + " beyond width " + std::to_string(width));
    }
    if (part.start < next) throw InputError(InputErrorCode::PartitionOverlap, part.name);
    if (part.start > next) {
      throw InputError(InputErrorCode::PartitionGap, "columns " + std::to_string(next) + "-" +
                                                         std::to_string(part.start - 1) + " unassigned");
    }
    next = part.end + 1;
  }
  if (next != width + 1) {
    throw InputError(InputErrorCode::PartitionGap,
                     "columns " + std::to_string(next) + "-" + std::to_string(width) + " unassigned");
  }

  std::vector<std::string> taxa;
  for (const auto& r : records) taxa.push_back(r.name);
  std::size_t outgroup_index = 0;
  if (outgroup) {
    auto it = std::find(taxa.begin(), taxa.end(), *outgroup);
    if (it == taxa.end()) throw InputError(InputErrorCode::UnknownOutgroup, *outgroup);
    outgroup_index = static_cast<std::size_t>(it - taxa.begin());
  }

  std::vector<Gene> genes;
  for (const auto& part : parts) {
    Gene gene{part.name, {}};
    for (const auto& r : records) gene.block.rows.push_back(r.sequence.substr(part.start - 1, part.end - part.start + 1));
    genes.push_back(std::move(gene));
  }
  return GeneMatrix(std::move(taxa), std::move(genes), outgroup_index);
}

GeneMatrix load_gene_matrix(const std::filesystem::path& fasta, const std::filesystem::path& partitions,
                            std::optional<std::string> outgroup) {
  return parse_gene_matrix(read_file(fasta), read_file(partitions), std::move(outgroup));
}

void write_fasta(const std::vector<std::string>& taxa, const AlignedBlock& block,
                 const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t t = 0; t < taxa.size(); ++t) out << '>' << taxa[t] << '\n' << block.rows.at(t) << '\n';
}

void write_gene_matrix(const GeneMatrix& matrix, const std::filesystem::path& fasta,
                       const std::filesystem::path& partitions) {
  write_fasta(matrix.taxa(), concat_subset(matrix, BinaryPosition::all_ones(matrix.gene_count())), fasta);
  std::ofstream out(partitions);
  if (!out) throw std::runtime_error("cannot write " + partitions.string());
  std::size_t start = 1;
  for (const auto& gene : matrix.genes()) {
    out << gene.name << " = " << start << '-' << start + gene.block.width() - 1 << '\n';
    start += gene.block.width();
  }
}

AlignedBlock concat_subset(const GeneMatrix& matrix, const BinaryPosition& w) {
  if (w.size() != matrix.gene_count()) {
    throw InputError(InputErrorCode::DimensionMismatch, "word length " + std::to_string(w.size()) +
                                                            " vs " + std::to_string(matrix.gene_count()) + " genes");
  }
  if (w.ones_count() == 0) throw InputError(InputErrorCode::EmptySubset, "no gene selected");
  AlignedBlock out;
  out.rows.resize(matrix.taxon_count());
  for (std::size_t g = 0; g < matrix.gene_count(); ++g) {
    if (!w.test(g)) continue;
    const auto& rows = matrix.genes()[g].block.rows;
    for (std::size_t t = 0; t < rows.size(); ++t) out.rows[t] += rows[t];
  }
  return out;
}

}  // namespace phyloswarm
