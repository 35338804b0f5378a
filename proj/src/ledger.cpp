#include "phyloswarm/ledger.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace phyloswarm {

void RunLedger::append(LedgerRecord record) { records_.push_back(std::move(record)); }

std::optional<LedgerRecord> RunLedger::best() const {
  const LedgerRecord* best = nullptr;
  for (const auto& r : records_) {
    if (!best || r.report.fitness > best->report.fitness) best = &r;
  }
  if (!best) return std::nullopt;
  return *best;
}

std::string RunLedger::header_value(const std::string& key, const std::string& fallback) const {
  auto it = header.find(key);
  return it == header.end() ? fallback : it->second;
}

void RunLedger::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write ledger " + path.string());
  for (const auto& [key, value] : header) out << "# " << key << '=' << value << '\n';
  for (const auto& r : records_) {
    out << r.iteration << '\t' << r.particle << '\t' << r.word.to_string() << '\t' << format_real(r.report.b)
        << '\t' << format_real(r.report.p) << '\t' << format_real(r.report.fitness) << '\t'
        << r.report.topology_id << '\n';
  }
}

RunLedger RunLedger::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read ledger " + path.string());
  RunLedger ledger;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.starts_with("# ")) {
      const auto eq = line.find('=');
      if (eq != std::string::npos) ledger.header[line.substr(2, eq - 2)] = line.substr(eq + 1);
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream stream(line);
    std::string field;
    while (std::getline(stream, field, '\t')) fields.push_back(field);
    if (line.back() == '\t') fields.emplace_back();
    if (fields.size() != 7) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected 7 tab-separated fields");
    }
    LedgerRecord r;
    r.iteration = std::stoul(fields[0]);
    r.particle = std::stoul(fields[1]);
    r.word = BinaryPosition::from_string(fields[2]);
    r.report = FitnessReport{parse_real(fields[3]), parse_real(fields[4]), parse_real(fields[5]), fields[6]};
    ledger.append(std::move(r));
  }
  return ledger;
}

}  // namespace phyloswarm
