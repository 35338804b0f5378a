#pragma once

// Deterministic random streams. The engine owns one stream per particle
// plus one for the master, all split from a single 64-bit seed, so a run is
// reproducible no matter where evaluations happen.

#include <cstdint>
#include <random>
#include <vector>

namespace phyloswarm {

/// SplitMix64 finalizer; used to derive independent substream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  bool contains(double v) const noexcept { return v >= lo && v <= hi; }
  double width() const noexcept { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0);

  /// Child stream `index`; deterministic and independent of draws already made.
  RngStream split(std::uint64_t index) const;

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi);
  double uniform(const Interval& range) { return uniform(range.lo, range.hi); }
  /// Uniform integer on the closed range [lo, hi], unbiased.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);
  bool bernoulli(double probability);

  std::uint64_t seed() const noexcept { return seed_; }

  bool operator==(const RngStream& other) const { return engine_ == other.engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// k distinct indices drawn uniformly from [0, n), in draw order.
std::vector<std::size_t> sample_without_replacement(RngStream& rng, std::size_t n, std::size_t k);

}  // namespace phyloswarm
