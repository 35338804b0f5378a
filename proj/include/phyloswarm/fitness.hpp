#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "phyloswarm/bitspace.hpp"

namespace phyloswarm {

/// Scores binary words. Implementations must be pure (the same word always
/// yields the same report) and safe to call from several threads at once.
class FitnessEvaluator {
 public:
  virtual ~FitnessEvaluator() = default;
  virtual FitnessReport evaluate(const BinaryPosition& w) const = 0;
  virtual std::size_t instance_size() const = 0;
};

/// Synthetic landscape with a planted optimum:
///   b = 100 - (100/N) * hamming(w, planted) + noise(w), clamped to [0,100]
/// where noise(w) is a seeded per-word value in [-noise_amplitude, +noise_amplitude].
class PlantedOracle final : public FitnessEvaluator {
 public:
  PlantedOracle(BinaryPosition planted, double noise_amplitude = 0.0, std::uint64_t seed = 0,
                PMode p_mode = PMode::Percent);

  FitnessReport evaluate(const BinaryPosition& w) const override;
  std::size_t instance_size() const override { return planted_.size(); }

  const BinaryPosition& planted() const noexcept { return planted_; }
  double noise_amplitude() const noexcept { return noise_amplitude_; }

  /// Upper bound on |F(w) - F(w')| for words at Hamming distance 1.
  double lipschitz_bound() const;

 private:
  double noise(const BinaryPosition& w) const;

  BinaryPosition planted_;
  double noise_amplitude_;
  std::uint64_t seed_;
  PMode p_mode_;
};

/// Wraps a callable as an evaluator; handy for constant or ad-hoc landscapes.
class FunctionEvaluator final : public FitnessEvaluator {
 public:
  using Function = std::function<FitnessReport(const BinaryPosition&)>;
  FunctionEvaluator(std::size_t size, Function fn) : size_(size), fn_(std::move(fn)) {}
  FitnessReport evaluate(const BinaryPosition& w) const override { return fn_(w); }
  std::size_t instance_size() const override { return size_; }

 private:
  std::size_t size_;
  Function fn_;
};

/// Word-keyed report cache. Concurrent lookups of the same missing word
/// trigger exactly one evaluator call; the others wait for its result.
class MemoCache {
 public:
  MemoCache() = default;
  MemoCache(const MemoCache&) = delete;
  MemoCache& operator=(const MemoCache&) = delete;

  FitnessReport evaluate(const FitnessEvaluator& evaluator, const BinaryPosition& w);

  bool contains(const BinaryPosition& w) const;
  std::size_t size() const;
  /// Number of evaluator invocations made through this cache.
  std::size_t misses() const;
  std::size_t hits() const;

  /// Records in insertion order: `<word> <b> <p> <fitness> <topology-id>`,
  /// with `-` standing for an absent topology.
  void save(const std::filesystem::path& path) const;
  void load(const std::filesystem::path& path);

 private:
  struct Entry {
    std::shared_future<FitnessReport> report;
  };

  mutable std::mutex mutex_;
  std::unordered_map<std::string, Entry> entries_;
  std::vector<std::string> order_;
  std::size_t misses_ = 0;
  std::size_t hits_ = 0;
};

FitnessReport evaluate_memoized(MemoCache& cache, const FitnessEvaluator& evaluator,
                                const BinaryPosition& w);

/// Evaluator adapter that routes every call through a (possibly shared) cache.
class MemoizedEvaluator final : public FitnessEvaluator {
 public:
  MemoizedEvaluator(const FitnessEvaluator& inner, std::shared_ptr<MemoCache> cache)
      : inner_(inner), cache_(std::move(cache)) {}
  explicit MemoizedEvaluator(const FitnessEvaluator& inner)
      : MemoizedEvaluator(inner, std::make_shared<MemoCache>()) {}

  FitnessReport evaluate(const BinaryPosition& w) const override {
    return cache_->evaluate(inner_, w);
  }
  std::size_t instance_size() const override { return inner_.instance_size(); }
  MemoCache& cache() const noexcept { return *cache_; }

 private:
  const FitnessEvaluator& inner_;
  std::shared_ptr<MemoCache> cache_;
};

}  // namespace phyloswarm
