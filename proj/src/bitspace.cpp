#include "phyloswarm/bitspace.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <system_error>

namespace phyloswarm {

BinaryPosition::BinaryPosition(std::size_t size, bool value)
    : size_(size), words_((size + kWordBits - 1) / kWordBits, value ? ~std::uint64_t{0} : 0) {
  clear_padding();
}

BinaryPosition BinaryPosition::from_string(std::string_view text) {
  BinaryPosition w(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '1') {
      w.set(i);
    } else if (text[i] != '0') {
      throw std::invalid_argument("binary word contains a character other than '0'/'1': " +
                                  std::string(text));
    }
  }
  return w;
}

bool BinaryPosition::test(std::size_t index) const {
  if (index >= size_) throw std::out_of_range("bit index out of range");
  return (words_[index / kWordBits] >> (index % kWordBits)) & 1U;
}

void BinaryPosition::set(std::size_t index, bool value) {
  if (index >= size_) throw std::out_of_range("bit index out of range");
  const std::uint64_t mask = std::uint64_t{1} << (index % kWordBits);
  if (value) {
    words_[index / kWordBits] |= mask;
  } else {
    words_[index / kWordBits] &= ~mask;
  }
}

void BinaryPosition::flip(std::size_t index) { set(index, !test(index)); }

std::size_t BinaryPosition::ones_count() const noexcept {
  std::size_t count = 0;
  for (auto word : words_) count += static_cast<std::size_t>(std::popcount(word));
  return count;
}

std::string BinaryPosition::to_string() const {
  std::string out(size_, '0');
  for (std::size_t i = 0; i < size_; ++i) {
    if ((words_[i / kWordBits] >> (i % kWordBits)) & 1U) out[i] = '1';
  }
  return out;
}

BinaryPosition BinaryPosition::complement() const {
  BinaryPosition out = *this;
  for (auto& word : out.words_) word = ~word;
  out.clear_padding();
  return out;
}

std::strong_ordering BinaryPosition::operator<=>(const BinaryPosition& other) const {
  const std::size_t common = std::min(size_, other.size_);
  for (std::size_t i = 0; i < common; ++i) {
    const bool a = test(i);
    const bool b = other.test(i);
    if (a != b) return a ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  return size_ <=> other.size_;
}

void BinaryPosition::clear_padding() noexcept {
  const std::size_t tail = size_ % kWordBits;
  if (tail != 0 && !words_.empty()) words_.back() &= (std::uint64_t{1} << tail) - 1;
}

std::size_t ones_count(const BinaryPosition& w) noexcept { return w.ones_count(); }

std::size_t hamming_distance(const BinaryPosition& a, const BinaryPosition& b) {
  if (a.size() != b.size()) throw std::invalid_argument("hamming distance: length mismatch");
  std::size_t distance = 0;
  for (std::size_t i = 0; i < a.size(); ++i) distance += a.test(i) != b.test(i) ? 1 : 0;
  return distance;
}

VelocityVector::VelocityVector(std::size_t size, double value) : values_(size, value) {
  if (!std::isfinite(value)) throw std::invalid_argument("velocity values must be finite");
}

VelocityVector::VelocityVector(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("velocity values must be finite");
  }
}

void VelocityVector::set(std::size_t index, double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("velocity values must be finite");
  values_.at(index) = value;
}

double VelocityVector::norm() const noexcept {
  double sum = 0.0;
  for (double v : values_) sum += v * v;
  return std::sqrt(sum);
}

std::string_view to_string(PMode mode) noexcept {
  return mode == PMode::Percent ? "percent" : "count";
}

PMode parse_p_mode(std::string_view text) {
  if (text == "percent") return PMode::Percent;
  if (text == "count") return PMode::Count;
  throw std::invalid_argument("p_mode must be 'percent' or 'count', got '" + std::string(text) + "'");
}

double percentage_ones(const BinaryPosition& w) {
  if (w.empty()) throw std::invalid_argument("percentage_ones: empty word");
  return 100.0 * static_cast<double>(w.ones_count()) / static_cast<double>(w.size());
}

double inclusion_score(const BinaryPosition& w, PMode mode) {
  return mode == PMode::Percent ? percentage_ones(w) : static_cast<double>(w.ones_count());
}

double combine_fitness(double b, double p) {
  if (!(b >= 0.0 && b <= 100.0)) throw std::domain_error("combine_fitness: b outside [0,100]");
  if (!(p >= 0.0 && p <= 100.0)) throw std::domain_error("combine_fitness: p outside [0,100]");
  return (b + p) / 2.0;
}

FitnessReport make_report(double b, double p, std::string topology_id) {
  return FitnessReport{b, p, combine_fitness(b, p), std::move(topology_id)};
}

std::string format_real(double value) {
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

double parse_real(std::string_view text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto result = std::from_chars(text.data(), end, value);
  if (result.ec != std::errc{} || result.ptr != end || text.empty()) {
    throw std::invalid_argument("not a real number: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace phyloswarm
