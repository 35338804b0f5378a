#include "phyloswarm/tree.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <stdexcept>

namespace phyloswarm {

void DistanceMatrix::set(std::size_t i, std::size_t j, double value) {
  if (i >= size_ || j >= size_) throw std::out_of_range("distance index out of range");
  if (i == j) return;
  values_[i * size_ + j] = value;
  values_[j * size_ + i] = value;
}

Split normalize_split(Split side) {
  if (!side.empty() && side.test(0)) return side.complement();
  return side;
}

UnrootedTree::UnrootedTree(std::vector<std::string> taxa, std::size_t node_count, std::vector<TreeEdge> edges)
    : taxa_(std::move(taxa)), edges_(std::move(edges)), adjacency_(node_count) {
  if (node_count < taxa_.size()) throw std::invalid_argument("tree: fewer nodes than taxa");
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    adjacency_.at(edges_[e].a).push_back(e);
    adjacency_.at(edges_[e].b).push_back(e);
  }
  for (std::size_t leaf = 0; leaf < taxa_.size(); ++leaf) {
    if (adjacency_[leaf].size() != 1 && taxa_.size() > 1) {
      throw std::invalid_argument("tree: leaf " + taxa_[leaf] + " must have exactly one edge");
    }
  }
}

bool UnrootedTree::is_internal_edge(std::size_t edge) const {
  const TreeEdge& e = edges_.at(edge);
  return !is_leaf(e.a) && !is_leaf(e.b);
}

std::vector<std::size_t> UnrootedTree::internal_edges() const {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (is_internal_edge(e)) out.push_back(e);
  }
  return out;
}

void UnrootedTree::collect_side(std::size_t node, std::size_t from_edge, Split& side) const {
  if (is_leaf(node)) side.set(node);
  for (std::size_t e : adjacency_[node]) {
    if (e == from_edge) continue;
    const std::size_t next = edges_[e].a == node ? edges_[e].b : edges_[e].a;
    collect_side(next, e, side);
  }
}

Split UnrootedTree::split_of(std::size_t edge) const {
  Split side(taxa_.size());
  collect_side(edges_.at(edge).b, edge, side);
  return normalize_split(std::move(side));
}

std::set<Split> UnrootedTree::splits() const {
  std::set<Split> out;
  for (std::size_t e : internal_edges()) out.insert(split_of(e));
  return out;
}

std::string TopologySignature::canonical_text() const {
  std::string text;
  for (std::size_t i = 0; i < taxa.size(); ++i) text += (i ? "," : "") + taxa[i];
  text += ';';
  for (std::size_t s = 0; s < bipartitions.size(); ++s) {
    if (s) text += '|';
    for (std::size_t i = 0; i < bipartitions[s].size(); ++i) text += (i ? "," : "") + bipartitions[s][i];
  }
  return text;
}

std::uint64_t TopologySignature::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : canonical_text()) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
  return h;
}

std::string TopologySignature::id() const {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash()));
  return buffer;
}

TopologySignature topology_signature(const UnrootedTree& tree) {
  TopologySignature sig;
  sig.taxa = tree.taxa();
  std::sort(sig.taxa.begin(), sig.taxa.end());
  for (const Split& split : tree.splits()) {
    std::vector<std::string> inside, outside;
    for (std::size_t t = 0; t < tree.leaf_count(); ++t) {
      (split.test(t) ? inside : outside).push_back(tree.taxa()[t]);
    }
    std::sort(inside.begin(), inside.end());
    std::sort(outside.begin(), outside.end());
    sig.bipartitions.push_back(std::min(inside, outside));
  }
  std::sort(sig.bipartitions.begin(), sig.bipartitions.end());
  return sig;
}

std::size_t robinson_foulds(const UnrootedTree& a, const UnrootedTree& b) {
  const auto sa = topology_signature(a).bipartitions;
  const auto sb = topology_signature(b).bipartitions;
  std::vector<std::vector<std::string>> diff;
  std::set_symmetric_difference(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(diff));
  return diff.size();
}

UnrootedTree neighbor_joining(const DistanceMatrix& d, const std::vector<std::string>& taxa) {
  const std::size_t n = taxa.size();
  if (n < 3) throw std::invalid_argument("neighbor joining needs at least 3 taxa");
  if (d.size() != n) throw std::invalid_argument("neighbor joining: matrix/taxa size mismatch");

  const std::size_t max_nodes = 2 * n - 2;
  std::vector<double> dist(max_nodes * max_nodes, 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return dist[i * max_nodes + j]; };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) at(i, j) = d(i, j);
  }

  std::vector<std::size_t> active(n);
  for (std::size_t i = 0; i < n; ++i) active[i] = i;
  std::vector<TreeEdge> edges;
  std::size_t next_node = n;

  while (active.size() > 3) {
    const std::size_t r = active.size();
    std::vector<double> row_sum(r, 0.0);
    for (std::size_t a = 0; a < r; ++a) {
      for (std::size_t b = 0; b < r; ++b) row_sum[a] += at(active[a], active[b]);
    }
    std::size_t best_a = 0, best_b = 1;
    double best_q = 0.0;
    bool first = true;
    for (std::size_t a = 0; a < r; ++a) {
      for (std::size_t b = a + 1; b < r; ++b) {
        const double q = static_cast<double>(r - 2) * at(active[a], active[b]) - row_sum[a] - row_sum[b];
        if (first || q < best_q) {
          best_q = q;
          best_a = a;
          best_b = b;
          first = false;
        }
      }
    }
    const std::size_t i = active[best_a];
    const std::size_t j = active[best_b];
    const double dij = at(i, j);
    double li = dij / 2.0 + (row_sum[best_a] - row_sum[best_b]) / (2.0 * static_cast<double>(r - 2));
    double lj = dij - li;
    if (li < 0.0) {
      li = 0.0;
      lj = dij;
    } else if (lj < 0.0) {
      lj = 0.0;
      li = dij;
    }
    li = std::max(0.0, li);
    lj = std::max(0.0, lj);
    const std::size_t u = next_node++;
    edges.push_back({u, i, li, std::nullopt});
    edges.push_back({u, j, lj, std::nullopt});
    for (std::size_t k : active) {
      if (k == i || k == j) continue;
      const double duk = (at(i, k) + at(j, k) - dij) / 2.0;
      at(u, k) = duk;
      at(k, u) = duk;
    }
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_b));
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_a));
    active.push_back(u);
  }

  // Three nodes left: join them at one center by the three-point formulas.
  const std::size_t a = active[0], b = active[1], c = active[2];
  const std::size_t center = next_node++;
  const double la = (at(a, b) + at(a, c) - at(b, c)) / 2.0;
  const double lb = (at(a, b) + at(b, c) - at(a, c)) / 2.0;
  const double lc = (at(a, c) + at(b, c) - at(a, b)) / 2.0;
  edges.push_back({center, a, std::max(0.0, la), std::nullopt});
  edges.push_back({center, b, std::max(0.0, lb), std::nullopt});
  edges.push_back({center, c, std::max(0.0, lc), std::nullopt});
  return UnrootedTree(taxa, next_node, std::move(edges));
}

namespace {

std::string format_length(double length) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6f", length);
  return buffer;
}

struct NewickWriter {
  const UnrootedTree& tree;

  std::string smallest_name(std::size_t node, std::size_t from_edge) const {
    if (tree.is_leaf(node)) return tree.taxa()[node];
    std::string best;
    for (std::size_t e : tree.incident(node)) {
      if (e == from_edge) continue;
      const auto& edge = tree.edges()[e];
      std::string candidate = smallest_name(edge.a == node ? edge.b : edge.a, e);
      if (best.empty() || candidate < best) best = std::move(candidate);
    }
    return best;
  }

  std::string children(std::size_t node, std::size_t from_edge) const {
    std::vector<std::pair<std::string, std::size_t>> order;
    for (std::size_t e : tree.incident(node)) {
      if (e == from_edge) continue;
      const auto& edge = tree.edges()[e];
      order.emplace_back(smallest_name(edge.a == node ? edge.b : edge.a, e), e);
    }
    std::sort(order.begin(), order.end());
    std::string out;
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (k) out += ',';
      out += subtree(node, order[k].second);
    }
    return out;
  }

  std::string subtree(std::size_t parent, std::size_t edge_index) const {
    const TreeEdge& edge = tree.edges()[edge_index];
    const std::size_t node = edge.a == parent ? edge.b : edge.a;
    std::string out;
    if (tree.is_leaf(node)) {
      out = tree.taxa()[node];
    } else {
      out = "(" + children(node, edge_index) + ")";
      if (edge.support) out += std::to_string(std::llround(*edge.support));
    }
    return out + ":" + format_length(edge.length);
  }
};

class NewickParser {
 public:
  struct Node {
    std::vector<std::size_t> children;
    std::string label;
    double length = 0.0;
  };

  explicit NewickParser(std::string_view text) : text_(text) {}

  std::vector<Node> parse() {
    skip_space();
    const std::size_t root = parse_node();
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ';') ++pos_;
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters");
    root_ = root;
    return std::move(nodes_);
  }

  std::size_t root() const noexcept { return root_; }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("newick: " + what + " at offset " + std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string parse_label() {
    skip_space();
    std::string label;
    if (pos_ < text_.size() && text_[pos_] == '\'') {
      ++pos_;
      while (pos_ < text_.size() && text_[pos_] != '\'') label += text_[pos_++];
      if (pos_ == text_.size()) fail("unterminated quoted label");
      ++pos_;
      return label;
    }
    while (pos_ < text_.size() && std::string_view(",():;").find(text_[pos_]) == std::string_view::npos &&
           !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      label += text_[pos_++];
    }
    return label;
  }

  std::size_t parse_node() {
    Node node;
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      while (true) {
        node.children.push_back(parse_node());
        skip_space();
        if (pos_ >= text_.size()) fail("unbalanced parentheses");
        if (text_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (text_[pos_] == ')') {
          ++pos_;
          break;
        }
        fail("expected ',' or ')'");
      }
    }
    node.label = parse_label();
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ':') {
      ++pos_;
      skip_space();
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::string_view("+-.0123456789eE").find(text_[pos_]) != std::string_view::npos) {
        ++pos_;
      }
      try {
        node.length = parse_real(text_.substr(start, pos_ - start));
      } catch (const std::invalid_argument&) {
        fail("bad branch length");
      }
    }
    if (node.children.empty() && node.label.empty()) fail("unnamed leaf");
    nodes_.push_back(std::move(node));
    return nodes_.size() - 1;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t root_ = 0;
  std::vector<Node> nodes_;
};

std::optional<double> parse_support(const std::string& label) {
  if (label.empty()) return std::nullopt;
  try {
    return parse_real(label);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

}  // namespace

std::string to_newick(const UnrootedTree& tree, std::size_t outgroup) {
  if (outgroup >= tree.leaf_count()) throw std::out_of_range("to_newick: outgroup out of range");
  NewickWriter writer{tree};
  const std::size_t out_edge = tree.incident(outgroup).front();
  const TreeEdge& e = tree.edges()[out_edge];
  const std::size_t anchor = e.a == outgroup ? e.b : e.a;
  return "(" + tree.taxa()[outgroup] + ":" + format_length(e.length) + "," + writer.children(anchor, out_edge) + ");";
}

UnrootedTree parse_newick(std::string_view text, const std::vector<std::string>& taxa) {
  NewickParser parser(text);
  std::vector<NewickParser::Node> nodes = parser.parse();
  const std::size_t root = parser.root();

  std::map<std::string, std::size_t> leaf_index;
  for (std::size_t t = 0; t < taxa.size(); ++t) leaf_index[taxa[t]] = t;

  std::vector<std::size_t> id(nodes.size());
  std::size_t next = taxa.size();
  std::vector<bool> seen(taxa.size(), false);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (nodes[k].children.empty()) {
      auto it = leaf_index.find(nodes[k].label);
      if (it == leaf_index.end()) throw std::invalid_argument("newick: unknown taxon " + nodes[k].label);
      if (seen[it->second]) throw std::invalid_argument("newick: duplicate taxon " + nodes[k].label);
      seen[it->second] = true;
      id[k] = it->second;
    } else {
      if (nodes[k].children.size() == 1) throw std::invalid_argument("newick: unary node");
      id[k] = next++;
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw std::invalid_argument("newick: tree does not contain every taxon");
  }

  std::vector<TreeEdge> edges;
  const auto& top = nodes[root];
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (k == root) continue;
    for (std::size_t child : nodes[k].children) {
      edges.push_back({id[k], id[child], nodes[child].length, parse_support(nodes[child].label)});
    }
  }
  std::size_t node_count = next;
  if (top.children.size() == 2) {
    // Suppress the degree-2 root: fuse its two edges into one.
    const auto& left = nodes[top.children[0]];
    const auto& right = nodes[top.children[1]];
    std::optional<double> support;
    if (!left.children.empty() && !right.children.empty()) {
      support = parse_support(left.label);
      if (!support) support = parse_support(right.label);
    }
    edges.push_back({id[top.children[0]], id[top.children[1]], left.length + right.length, support});
    // Nodes are numbered in post-order, so the root holds the highest id and
    // dropping it keeps the ids dense.
    --node_count;
  } else {
    for (std::size_t child : top.children) {
      edges.push_back({id[root], id[child], nodes[child].length, parse_support(nodes[child].label)});
    }
  }
  return UnrootedTree(taxa, node_count, std::move(edges));
}

}  // namespace phyloswarm
