#pragma once

// Value types shared by the optimizers, the fitness layer and the runtime:
// binary words over N genes, real velocities and scored reports.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace phyloswarm {

/// A subset of N items encoded as a packed binary word. Bit j is the j-th
/// item in the instance's frozen (lexicographic) order.
class BinaryPosition {
 public:
  BinaryPosition() = default;
  explicit BinaryPosition(std::size_t size, bool value = false);

  static BinaryPosition all_ones(std::size_t size) { return BinaryPosition(size, true); }
  static BinaryPosition all_zeros(std::size_t size) { return BinaryPosition(size, false); }

  /// Parses the canonical text form: '0'/'1' characters, index 0 first.
  static BinaryPosition from_string(std::string_view text);

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  bool test(std::size_t index) const;
  void set(std::size_t index, bool value = true);
  void flip(std::size_t index);

  std::size_t ones_count() const noexcept;
  std::string to_string() const;

  BinaryPosition complement() const;

  bool operator==(const BinaryPosition& other) const = default;
  /// Orders like the canonical strings ('0' < '1', shorter words first on a
  /// common prefix).
  std::strong_ordering operator<=>(const BinaryPosition& other) const;

 private:
  static constexpr std::size_t kWordBits = 64;
  void clear_padding() noexcept;

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

std::size_t ones_count(const BinaryPosition& w) noexcept;
std::size_t hamming_distance(const BinaryPosition& a, const BinaryPosition& b);

/// Real-valued velocity of a particle. Every stored value is finite.
class VelocityVector {
 public:
  VelocityVector() = default;
  explicit VelocityVector(std::size_t size, double value = 0.0);
  explicit VelocityVector(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t index) const { return values_[index]; }
  void set(std::size_t index, double value);
  std::span<const double> values() const noexcept { return values_; }

  double norm() const noexcept;

  bool operator==(const VelocityVector&) const = default;

 private:
  std::vector<double> values_;
};

/// How the gene-inclusion term p enters the fitness.
enum class PMode { Percent, Count };

std::string_view to_string(PMode mode) noexcept;
PMode parse_p_mode(std::string_view text);

/// b, p and F = (b+p)/2 for one evaluated word. topology_id is the stable
/// hash of the inferred tree's topology, empty when the evaluator has none.
struct FitnessReport {
  double b = 0.0;
  double p = 0.0;
  double fitness = 0.0;
  std::string topology_id;

  bool has_topology() const noexcept { return !topology_id.empty(); }
  bool operator==(const FitnessReport&) const = default;
};

double percentage_ones(const BinaryPosition& w);
/// p under the given convention: percent of ones, or the raw ones count.
double inclusion_score(const BinaryPosition& w, PMode mode);
double combine_fitness(double b, double p);
FitnessReport make_report(double b, double p, std::string topology_id = {});

/// Shortest decimal text that parses back to the identical double.
std::string format_real(double value);
double parse_real(std::string_view text);

}  // namespace phyloswarm
