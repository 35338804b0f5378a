#include "phyloswarm/fitness.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "phyloswarm/rng.hpp"

namespace phyloswarm {

PlantedOracle::PlantedOracle(BinaryPosition planted, double noise_amplitude, std::uint64_t seed,
                             PMode p_mode)
    : planted_(std::move(planted)), noise_amplitude_(noise_amplitude), seed_(seed), p_mode_(p_mode) {
  if (planted_.empty()) throw std::invalid_argument("planted oracle needs N >= 1");
  if (!(noise_amplitude_ >= 0.0)) throw std::invalid_argument("noise amplitude must be >= 0");
}

double PlantedOracle::noise(const BinaryPosition& w) const {
  if (noise_amplitude_ == 0.0) return 0.0;
  // FNV-1a over the canonical text.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : w.to_string()) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
  RngStream rng(mix64(seed_) ^ h);
  return rng.uniform(-noise_amplitude_, noise_amplitude_);
}

FitnessReport PlantedOracle::evaluate(const BinaryPosition& w) const {
  if (w.size() != planted_.size()) throw std::invalid_argument("planted oracle: dimension mismatch");
  const double n = static_cast<double>(planted_.size());
  double b = 100.0 - (100.0 / n) * static_cast<double>(hamming_distance(w, planted_)) + noise(w);
  b = std::clamp(b, 0.0, 100.0);
  return make_report(b, inclusion_score(w, p_mode_));
}

double PlantedOracle::lipschitz_bound() const {
  const double n = static_cast<double>(planted_.size());
  const double p_step = p_mode_ == PMode::Percent ? 100.0 / n : 1.0;
  // b moves by 100/N plus at most the full noise swing; F halves the sum.
  return (100.0 / n + 2.0 * noise_amplitude_ + p_step) / 2.0;
}

FitnessReport MemoCache::evaluate(const FitnessEvaluator& evaluator, const BinaryPosition& w) {
  std::string key = w.to_string();
  std::promise<FitnessReport> promise;
  std::shared_future<FitnessReport> pending;
  {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) {
      ++hits_;
      pending = it->second.report;
    } else {
      ++misses_;
      entries_.emplace(key, Entry{promise.get_future().share()});
      order_.push_back(key);
    }
  }
  if (pending.valid()) return pending.get();

  try {
    FitnessReport report = evaluator.evaluate(w);
    promise.set_value(report);
    return report;
  } catch (...) {
    // Drop the failed entry so a later call can retry; waiters see the error.
    promise.set_exception(std::current_exception());
    std::lock_guard lock(mutex_);
    entries_.erase(key);
    order_.erase(std::remove(order_.begin(), order_.end(), key), order_.end());
    throw;
  }
}

bool MemoCache::contains(const BinaryPosition& w) const {
  std::lock_guard lock(mutex_);
  return entries_.contains(w.to_string());
}

std::size_t MemoCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::size_t MemoCache::misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

std::size_t MemoCache::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

void MemoCache::save(const std::filesystem::path& path) const {
  std::vector<std::pair<std::string, std::shared_future<FitnessReport>>> snapshot;
  {
    std::lock_guard lock(mutex_);
    for (const auto& key : order_) snapshot.emplace_back(key, entries_.at(key).report);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write cache file " + path.string());
  for (const auto& [word, future] : snapshot) {
    const FitnessReport& r = future.get();
    out << word << ' ' << format_real(r.b) << ' ' << format_real(r.p) << ' '
        << format_real(r.fitness) << ' ' << (r.has_topology() ? r.topology_id : "-") << '\n';
  }
}

void MemoCache::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read cache file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string word, b, p, fitness, topology;
    if (!(fields >> word >> b >> p >> fitness >> topology)) {
      throw std::runtime_error("malformed cache record at line " + std::to_string(line_no));
    }
    BinaryPosition::from_string(word);
    FitnessReport report{parse_real(b), parse_real(p), parse_real(fitness),
                         topology == "-" ? std::string{} : topology};
    std::promise<FitnessReport> ready;
    ready.set_value(std::move(report));
    std::lock_guard lock(mutex_);
    if (entries_.emplace(word, Entry{ready.get_future().share()}).second) order_.push_back(word);
  }
}

FitnessReport evaluate_memoized(MemoCache& cache, const FitnessEvaluator& evaluator,
                                const BinaryPosition& w) {
  return cache.evaluate(evaluator, w);
}

}  // namespace phyloswarm
