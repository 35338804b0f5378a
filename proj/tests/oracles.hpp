#pragma once

// Reference implementations used only by tests. They share no code with the
// library beyond its value types.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "phyloswarm/bitspace.hpp"
#include "phyloswarm/fitness.hpp"
#include "phyloswarm/tree.hpp"
#include "phyloswarm/wire.hpp"

namespace oracle {

using SplitSet = std::set<std::vector<std::string>>;

/// Binary unrooted tree with positive branch lengths built by random
/// stepwise leaf addition. Leaves are nodes 0..n-1.
struct RandomTree {
  std::vector<std::string> taxa;
  std::size_t node_count = 0;
  struct Edge {
    std::size_t a, b;
    double length;
  };
  std::vector<Edge> edges;

  std::vector<std::vector<std::pair<std::size_t, double>>> adjacency() const {
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(node_count);
    for (const auto& e : edges) {
      adj[e.a].push_back({e.b, e.length});
      adj[e.b].push_back({e.a, e.length});
    }
    return adj;
  }

  /// Path-length distances between leaves.
  phyloswarm::DistanceMatrix additive_distances() const {
    const auto adj = adjacency();
    const std::size_t n = taxa.size();
    phyloswarm::DistanceMatrix d(n);
    for (std::size_t s = 0; s < n; ++s) {
      std::vector<double> dist(node_count, -1.0);
      std::vector<std::size_t> stack{s};
      dist[s] = 0.0;
      while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (const auto& [v, len] : adj[u]) {
          if (dist[v] < 0.0) {
            dist[v] = dist[u] + len;
            stack.push_back(v);
          }
        }
      }
      for (std::size_t t = 0; t < n; ++t) {
        if (t != s) d.set(s, t, dist[t]);
      }
    }
    return d;
  }

  /// Non-trivial bipartitions, each as the side without the smallest taxon
  /// name, sorted.
  SplitSet splits() const {
    const auto adj = adjacency();
    SplitSet out;
    for (const auto& e : edges) {
      if (e.a < taxa.size() || e.b < taxa.size()) continue;
      std::vector<bool> seen(node_count, false);
      seen[e.a] = true;
      std::vector<std::size_t> stack{e.b};
      seen[e.b] = true;
      std::vector<std::string> side;
      while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        if (u < taxa.size()) side.push_back(taxa[u]);
        for (const auto& [v, len] : adj[u]) {
          if (!seen[v]) {
            seen[v] = true;
            stack.push_back(v);
          }
        }
      }
      out.insert(orient(side));
    }
    return out;
  }

  std::vector<std::string> orient(std::vector<std::string> side) const {
    const std::string anchor = *std::min_element(taxa.begin(), taxa.end());
    if (std::find(side.begin(), side.end(), anchor) != side.end()) {
      std::vector<std::string> other;
      for (const auto& t : taxa) {
        if (std::find(side.begin(), side.end(), t) == side.end()) other.push_back(t);
      }
      side = std::move(other);
    }
    std::sort(side.begin(), side.end());
    return side;
  }
};

inline RandomTree random_tree(std::size_t n, std::mt19937_64& gen, double min_len = 0.1, double max_len = 2.0) {
  std::uniform_real_distribution<double> length(min_len, max_len);
  RandomTree t;
  for (std::size_t i = 0; i < n; ++i) t.taxa.push_back("T" + std::to_string(i));
  t.node_count = n;
  const std::size_t hub = t.node_count++;
  for (std::size_t leaf = 0; leaf < 3; ++leaf) t.edges.push_back({leaf, hub, length(gen)});
  for (std::size_t leaf = 3; leaf < n; ++leaf) {
    std::uniform_int_distribution<std::size_t> pick(0, t.edges.size() - 1);
    const std::size_t e = pick(gen);
    const auto old = t.edges[e];
    const std::size_t mid = t.node_count++;
    t.edges[e] = {old.a, mid, length(gen)};
    t.edges.push_back({mid, old.b, length(gen)});
    t.edges.push_back({leaf, mid, length(gen)});
  }
  return t;
}

/// Bipartitions from a signature, oriented the same way as RandomTree::splits.
inline SplitSet signature_splits(const phyloswarm::TopologySignature& sig, const RandomTree& ref) {
  SplitSet out;
  for (const auto& side : sig.bipartitions) out.insert(ref.orient(side));
  return out;
}

/// Exhaustive maximum of an evaluator over {0,1}^N.
inline std::pair<phyloswarm::BinaryPosition, double> brute_force_max(const phyloswarm::FitnessEvaluator& ev) {
  const std::size_t n = ev.instance_size();
  phyloswarm::BinaryPosition best;
  double best_fitness = -1.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    phyloswarm::BinaryPosition w(n);
    for (std::size_t j = 0; j < n; ++j) {
      if ((mask >> j) & 1U) w.set(j);
    }
    const double f = ev.evaluate(w).fitness;
    if (f > best_fitness) {
      best_fitness = f;
      best = w;
    }
  }
  return {best, best_fitness};
}

/// Counts evaluator invocations.
class CountingEvaluator final : public phyloswarm::FitnessEvaluator {
 public:
  explicit CountingEvaluator(const phyloswarm::FitnessEvaluator& inner) : inner_(inner) {}
  phyloswarm::FitnessReport evaluate(const phyloswarm::BinaryPosition& w) const override {
    ++calls_;
    return inner_.evaluate(w);
  }
  std::size_t instance_size() const override { return inner_.instance_size(); }
  std::size_t calls() const { return calls_.load(); }

 private:
  const phyloswarm::FitnessEvaluator& inner_;
  mutable std::atomic<std::size_t> calls_{0};
};

inline phyloswarm::BinaryPosition random_word(std::size_t n, std::mt19937_64& gen) {
  phyloswarm::BinaryPosition w(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (gen() & 1U) w.set(j);
  }
  return w;
}

/// Valid message of a random kind; fields the kind does not carry stay empty.
inline phyloswarm::WireMessage random_message(std::mt19937_64& gen) {
  using phyloswarm::MessageKind;
  auto text = [&](std::size_t max_len) {
    std::string s;
    const std::size_t len = gen() % (max_len + 1);
    for (std::size_t i = 0; i < len; ++i) s.push_back(static_cast<char>(gen() % 256));
    return s;
  };
  auto real = [&] {
    return phyloswarm::format_real(std::uniform_real_distribution<double>(0.0, 100.0)(gen));
  };
  phyloswarm::WireMessage m;
  m.kind = static_cast<MessageKind>(gen() % 6);
  m.run_id = text(12);
  m.protocol_version = static_cast<std::uint32_t>(gen());
  if (m.kind == MessageKind::Assign || m.kind == MessageKind::Result || m.kind == MessageKind::Best) {
    m.iteration = gen();
    m.word = random_word(1 + gen() % 200, gen).to_string();
  }
  if (m.kind == MessageKind::Assign || m.kind == MessageKind::Result) m.particle_id = gen();
  if (m.kind == MessageKind::Result) {
    m.b = real();
    m.p = real();
    if (gen() & 1U) {
      char hex[17];
      std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(gen()));
      m.topology_id = hex;
    }
  }
  if (m.kind == MessageKind::Result || m.kind == MessageKind::Best) m.fitness = real();
  if (m.kind == MessageKind::Error) m.detail = text(40);
  return m;
}

}  // namespace oracle
