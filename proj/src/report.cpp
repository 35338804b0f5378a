#include "phyloswarm/report.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace phyloswarm {

namespace {

std::size_t swarm_of(const RunLedger& ledger) {
  const std::string text = ledger.header_value("swarm", "1");
  try {
    return std::stoul(text);
  } catch (const std::exception&) {
    throw std::runtime_error("ledger header swarm is not a number: " + text);
  }
}

std::string join_numbers(const std::set<std::size_t>& values) {
  std::string out;
  for (std::size_t v : values) {
    if (!out.empty()) out += ", ";
    out += std::to_string(v);
  }
  return out;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

constexpr const char* kSummaryColumns[] = {
    "instance", "method", "particles", "swarm", "rep", "seed", "N", "evaluations", "unique_words",
    "iterations", "terminus", "best_word", "b", "p", "fitness", "topology_id"};

}  // namespace

std::string Table::to_text() const {
  std::vector<std::size_t> width(columns.size(), 0);
  for (std::size_t c = 0; c < columns.size(); ++c) width[c] = columns[c].size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const std::string& cell = c < cells.size() ? cells[c] : std::string();
      if (c > 0) line += "  ";
      line += cell + std::string(width[c] - cell.size(), ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
  };
  emit(columns);
  std::size_t total = 0;
  for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + (c > 0 ? 2 : 0);
  out << std::string(total, '-') << '\n';
  for (const auto& row : rows) emit(row);
  return out.str();
}

std::string Table::to_tsv() const {
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) out << (c ? "\t" : "") << cells[c];
    out << '\n';
  };
  emit(columns);
  for (const auto& row : rows) emit(row);
  return out.str();
}

void save_summaries(const std::filesystem::path& path, const std::vector<RunSummary>& summaries) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write summary " + path.string());
  bool first = true;
  for (const char* column : kSummaryColumns) {
    out << (first ? "" : "\t") << column;
    first = false;
  }
  out << '\n';
  for (const auto& s : summaries) {
    out << s.instance << '\t' << s.method << '\t' << s.particles << '\t' << s.swarm << '\t' << s.rep << '\t' << s.seed
        << '\t' << s.N << '\t' << s.evaluations << '\t' << s.unique_words << '\t' << s.iterations << '\t'
        << s.terminus << '\t' << s.best_word.to_string() << '\t' << format_real(s.best.b) << '\t'
        << format_real(s.best.p) << '\t' << format_real(s.best.fitness) << '\t' << s.best.topology_id << '\n';
  }
}

std::vector<RunSummary> load_summaries(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read summary " + path.string());
  std::vector<RunSummary> summaries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    const auto f = split_tabs(line);
    if (f.size() != std::size(kSummaryColumns)) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(std::size(kSummaryColumns)) + " fields");
    }
    RunSummary s;
    s.instance = f[0];
    s.method = f[1];
    s.particles = std::stoul(f[2]);
    s.swarm = std::stoul(f[3]);
    s.rep = std::stoul(f[4]);
    s.seed = std::stoull(f[5]);
    s.N = std::stoul(f[6]);
    s.evaluations = std::stoul(f[7]);
    s.unique_words = std::stoul(f[8]);
    s.iterations = std::stoul(f[9]);
    s.terminus = std::stoi(f[10]);
    s.best_word = BinaryPosition::from_string(f[11]);
    s.best = FitnessReport{parse_real(f[12]), parse_real(f[13]), parse_real(f[14]), f[15]};
    summaries.push_back(std::move(s));
  }
  return summaries;
}

Table topology_table(const std::vector<RunLedger>& ledgers) {
  struct Group {
    std::set<std::size_t> swarms;
    const LedgerRecord* best = nullptr;
    std::size_t occurrences = 0;
  };
  std::map<std::string, Group> groups;
  for (const auto& ledger : ledgers) {
    const std::size_t swarm = swarm_of(ledger);
    for (const auto& record : ledger.records()) {
      if (!record.report.has_topology()) continue;
      Group& g = groups[record.report.topology_id];
      g.swarms.insert(swarm);
      ++g.occurrences;
      if (!g.best || record.report.fitness > g.best->report.fitness) g.best = &record;
    }
  }
  std::vector<std::pair<std::string, const Group*>> order;
  for (const auto& [id, group] : groups) order.emplace_back(id, &group);
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.second->best->report.fitness != b.second->best->report.fitness) {
      return a.second->best->report.fitness > b.second->best->report.fitness;
    }
    return a.second->occurrences > b.second->occurrences;
  });

  Table table;
  table.columns = {"Topology", "Id", "Swarms", "b", "p", "F", "Occurrences"};
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const Group& g = *order[rank].second;
    const FitnessReport& r = g.best->report;
    table.rows.push_back({std::to_string(rank), order[rank].first, join_numbers(g.swarms), format_real(r.b),
                          format_real(r.p), format_real(r.fitness), std::to_string(g.occurrences)});
  }
  return table;
}

Table best_per_swarm_table(const std::vector<RunLedger>& ledgers) {
  std::map<std::size_t, const LedgerRecord*> best;
  for (const auto& ledger : ledgers) {
    const std::size_t swarm = swarm_of(ledger);
    for (const auto& record : ledger.records()) {
      const LedgerRecord*& slot = best[swarm];
      if (!slot || record.report.fitness > slot->report.fitness) slot = &record;
    }
  }
  Table table;
  table.columns = {"Swarm", "Removed genes", "F", "b"};
  for (const auto& [swarm, record] : best) {
    if (!record) continue;
    const std::size_t removed = record->word.size() - record->word.ones_count();
    table.rows.push_back({std::to_string(swarm), std::to_string(removed), format_real(record->report.fitness),
                          format_real(record->report.b)});
  }
  return table;
}

Table compare_methods(const std::vector<RunSummary>& summaries) {
  using Key = std::tuple<std::string, std::string, std::size_t>;  // instance, method, particles
  std::map<Key, const RunSummary*> best;
  std::vector<std::string> instances;
  std::set<std::size_t> particle_counts;
  for (const auto& s : summaries) {
    if (std::find(instances.begin(), instances.end(), s.instance) == instances.end()) instances.push_back(s.instance);
    const std::size_t particles = s.method == "ga" ? 0 : s.particles;
    if (s.method != "ga") particle_counts.insert(particles);
    const RunSummary*& slot = best[{s.instance, s.method, particles}];
    if (!slot || s.best.fitness > slot->best.fitness) slot = &s;
  }
  if (particle_counts.empty()) particle_counts.insert(10);
  std::sort(instances.begin(), instances.end());

  std::vector<std::pair<std::string, std::size_t>> columns;
  for (const char* method : {"bpso1", "bpso2"}) {
    for (std::size_t particles : particle_counts) columns.emplace_back(method, particles);
  }
  columns.emplace_back("ga", 0);

  Table table;
  table.columns.push_back("Instance");
  for (const auto& [method, particles] : columns) {
    table.columns.push_back(method == "ga" ? std::string("ga") : method + " L=" + std::to_string(particles));
  }
  for (const auto& instance : instances) {
    std::vector<std::string> row{instance};
    for (const auto& [method, particles] : columns) {
      auto it = best.find({instance, method, particles});
      row.push_back(it == best.end() ? "-" : format_real(it->second->best.b));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace phyloswarm
