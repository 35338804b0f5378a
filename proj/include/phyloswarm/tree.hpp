#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "phyloswarm/bitspace.hpp"

namespace phyloswarm {

/// Symmetric taxon-by-taxon distances with an exactly zero diagonal.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(std::size_t size = 0) : size_(size), values_(size * size, 0.0) {}

  std::size_t size() const noexcept { return size_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * size_ + j]; }
  /// Sets both (i,j) and (j,i). Diagonal entries stay 0.
  void set(std::size_t i, std::size_t j, double value);

 private:
  std::size_t size_;
  std::vector<double> values_;
};

/// Leaf set on one side of an edge, as a bit per taxon. Normalized splits
/// never contain taxon 0, so both sides of an edge map to one value.
using Split = BinaryPosition;

Split normalize_split(Split side);

struct TreeEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double length = 0.0;
  std::optional<double> support;
};

/// Unrooted tree. Nodes 0..taxa-1 are the leaves in taxon order; the rest are
/// unlabeled internal nodes.
class UnrootedTree {
 public:
  UnrootedTree() = default;
  UnrootedTree(std::vector<std::string> taxa, std::size_t node_count, std::vector<TreeEdge> edges);

  const std::vector<std::string>& taxa() const noexcept { return taxa_; }
  std::size_t leaf_count() const noexcept { return taxa_.size(); }
  std::size_t node_count() const noexcept { return adjacency_.size(); }
  const std::vector<TreeEdge>& edges() const noexcept { return edges_; }
  std::vector<TreeEdge>& mutable_edges() noexcept { return edges_; }
  const std::vector<std::size_t>& incident(std::size_t node) const { return adjacency_.at(node); }

  bool is_leaf(std::size_t node) const noexcept { return node < taxa_.size(); }
  bool is_internal_edge(std::size_t edge) const;
  std::vector<std::size_t> internal_edges() const;

  /// Normalized split induced by removing the edge.
  Split split_of(std::size_t edge) const;
  std::set<Split> splits() const;

 private:
  void collect_side(std::size_t node, std::size_t from_edge, Split& side) const;

  std::vector<std::string> taxa_;
  std::vector<TreeEdge> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

/// Canonical unrooted topology: every non-trivial bipartition written as the
/// lexicographically smaller side's sorted taxon names, the whole set sorted.
struct TopologySignature {
  std::vector<std::string> taxa;                         // sorted
  std::vector<std::vector<std::string>> bipartitions;    // sorted

  std::string canonical_text() const;
  std::uint64_t hash() const;
  /// 16 lowercase hex digits of hash().
  std::string id() const;

  bool operator==(const TopologySignature&) const = default;
};

TopologySignature topology_signature(const UnrootedTree& tree);
std::size_t robinson_foulds(const UnrootedTree& a, const UnrootedTree& b);

/// Saitou-Nei neighbor joining. Ties in the Q-criterion go to the smallest
/// (i, j) pair of active-node positions; negative branch lengths are set to 0
/// and the deficit is taken from the sister branch.
UnrootedTree neighbor_joining(const DistanceMatrix& d, const std::vector<std::string>& taxa);

/// Newick with integer supports on internal nodes and 6-decimal branch
/// lengths, displayed rooted on the edge leading to `outgroup`.
std::string to_newick(const UnrootedTree& tree, std::size_t outgroup = 0);

/// Reads a (possibly rooted) Newick tree over exactly `taxa`. Numeric
/// internal-node labels become supports of the edge above that node. A
/// degree-2 root is suppressed.
UnrootedTree parse_newick(std::string_view text, const std::vector<std::string>& taxa);

}  // namespace phyloswarm
