#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "incinf/graph.hpp"

namespace testing_support {

using incinf::NodeId;
using incinf::Snapshot;

/// Nodes 0..n-1, each ordered pair linked with probability `density`, edge
/// probabilities uniform in [lo, hi].
inline Snapshot random_graph(std::mt19937_64& rng, std::size_t n, double density, double lo = 0.05,
                             double hi = 0.95) {
  Snapshot g;
  std::uniform_real_distribution<double> coin(0.0, 1.0), weight(lo, hi);
  for (NodeId u = 0; u < n; ++u) g.apply(incinf::AddNode{u});
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) {
      if (u != v && coin(rng) < density) g.apply(incinf::AddEdge{u, v, weight(rng)});
    }
  }
  return g;
}

/// Random graph with exactly `edges` edges (or as many as fit).
inline Snapshot random_graph_edges(std::mt19937_64& rng, std::size_t n, std::size_t edges, double lo = 0.05,
                                   double hi = 0.95) {
  Snapshot g;
  for (NodeId u = 0; u < n; ++u) g.apply(incinf::AddNode{u});
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) {
      if (u != v) pairs.emplace_back(u, v);
    }
  }
  std::shuffle(pairs.begin(), pairs.end(), rng);
  std::uniform_real_distribution<double> weight(lo, hi);
  for (std::size_t i = 0; i < std::min(edges, pairs.size()); ++i) {
    g.apply(incinf::AddEdge{pairs[i].first, pairs[i].second, weight(rng)});
  }
  return g;
}

/// Sequentially valid stream of `length` changes covering all six kinds.
/// Node removals strip the node's edges first (emitted as RemoveEdge).
/// `probs` lists the probabilities new edges draw from; empty means uniform.
inline incinf::ChangeStream random_stream(std::mt19937_64& rng, const Snapshot& start, std::size_t length,
                                          std::vector<double> probs = {}) {
  using namespace incinf;
  Snapshot g = start;
  ChangeStream stream;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw_prob = [&] {
    if (probs.empty()) return 0.05 + 0.9 * unit(rng);
    return probs[rng() % probs.size()];
  };
  auto push = [&](TopologyChange c) {
    g.apply(c);
    stream.push_back(c);
  };
  NodeId next_id = static_cast<NodeId>(g.capacity());
  while (stream.size() < length) {
    const auto nodes = g.nodes();
    const auto edges = g.edges();
    switch (rng() % 6) {
      case 0: {
        // Occasionally revive a removed id.
        NodeId id = next_id;
        for (NodeId v = 0; v < g.capacity(); ++v) {
          if (!g.contains(v) && rng() % 2 == 0) {
            id = v;
            break;
          }
        }
        if (id == next_id) ++next_id;
        push(AddNode{id});
        break;
      }
      case 1: {
        if (nodes.size() < 3) break;
        const NodeId v = nodes[rng() % nodes.size()];
        const std::vector<Arc> outs(g.out_arcs(v).begin(), g.out_arcs(v).end());
        const std::vector<Arc> ins(g.in_arcs(v).begin(), g.in_arcs(v).end());
        for (const auto& a : outs) {
          if (stream.size() < length) push(RemoveEdge{v, a.node});
        }
        for (const auto& a : ins) {
          if (stream.size() < length) push(RemoveEdge{a.node, v});
        }
        if (stream.size() < length && g.out_degree(v) == 0 && g.in_degree(v) == 0) push(RemoveNode{v});
        break;
      }
      case 2: {
        if (nodes.size() < 2) break;
        for (int attempt = 0; attempt < 20; ++attempt) {
          const NodeId u = nodes[rng() % nodes.size()];
          const NodeId v = nodes[rng() % nodes.size()];
          if (u == v || g.has_edge(u, v)) continue;
          push(AddEdge{u, v, draw_prob()});
          break;
        }
        break;
      }
      case 3: {
        if (edges.empty()) break;
        const auto& e = edges[rng() % edges.size()];
        push(RemoveEdge{e.from, e.to});
        break;
      }
      case 4: {
        if (edges.empty()) break;
        const auto& e = edges[rng() % edges.size()];
        if (e.prob >= 1.0) break;
        const double delta = (1.0 - e.prob) * (0.05 + 0.9 * unit(rng));
        push(AddWeight{e.from, e.to, delta});
        break;
      }
      case 5: {
        if (edges.empty()) break;
        const auto& e = edges[rng() % edges.size()];
        const double delta = e.prob * (0.05 + 0.9 * unit(rng));
        push(DecWeight{e.from, e.to, delta});
        break;
      }
    }
  }
  return stream;
}

/// Best path probability from u to every node, by exhaustive enumeration of
/// simple paths. Unreachable nodes are absent.
inline std::map<NodeId, double> brute_best_probs(const Snapshot& g, NodeId u) {
  std::map<NodeId, double> best;
  std::vector<char> on_path(g.capacity(), 0);
  std::function<void(NodeId, double)> walk = [&](NodeId x, double p) {
    auto [it, inserted] = best.try_emplace(x, p);
    if (!inserted) it->second = std::max(it->second, p);
    on_path[x] = 1;
    for (const auto& a : g.out_arcs(x)) {
      if (!on_path[a.node]) walk(a.node, p * a.prob);
    }
    on_path[x] = 0;
  };
  walk(u, 1.0);
  return best;
}

/// Best simple path from u to v (highest product; ties: fewer hops, then
/// lexicographically smaller node sequence).
inline std::vector<NodeId> brute_best_path(const Snapshot& g, NodeId u, NodeId v, double* prob_out = nullptr) {
  std::vector<NodeId> best, path{u};
  double best_p = -1.0;
  std::vector<char> on_path(g.capacity(), 0);
  std::function<void(NodeId, double)> walk = [&](NodeId x, double p) {
    if (x == v) {
      const bool better = p > best_p * (1 + 1e-12) ||
                          (std::abs(p - best_p) <= 1e-12 * best_p &&
                           (path.size() < best.size() || (path.size() == best.size() && path < best)));
      if (better) best_p = p, best = path;
      return;
    }
    on_path[x] = 1;
    for (const auto& a : g.out_arcs(x)) {
      if (on_path[a.node]) continue;
      path.push_back(a.node);
      walk(a.node, p * a.prob);
      path.pop_back();
    }
    on_path[x] = 0;
  };
  walk(u, 1.0);
  if (prob_out) *prob_out = best_p;
  return best;
}

inline bool admitted(double prob, double theta) { return -std::log(prob) <= -std::log(theta) * (1 + 1e-12); }

/// Localized spread by direct evaluation of the definition: best-path
/// probabilities from enumeration, activation through the in-tree formed by
/// each source's best path into j. Assumes no ties among best paths.
inline double brute_mia_spread(const Snapshot& g, NodeId v, const std::vector<NodeId>& seeds, double theta) {
  auto is_seed = [&](NodeId x) { return std::find(seeds.begin(), seeds.end(), x) != seeds.end(); };
  std::function<double(NodeId)> activation = [&](NodeId j) -> double {
    if (is_seed(j)) return 1.0;
    // Parent of each admitted source in the in-tree of j.
    std::map<NodeId, NodeId> next_hop;
    for (NodeId i : g.nodes()) {
      if (i == j) continue;
      double p = 0;
      auto path = brute_best_path(g, i, j, &p);
      if (path.empty() || !admitted(p, theta)) continue;
      next_hop[i] = path[1];
    }
    std::function<double(NodeId)> act = [&](NodeId x) -> double {
      if (is_seed(x)) return 1.0;
      double fail = 1.0;
      for (const auto& [i, hop] : next_hop) {
        if (hop == x) fail *= 1.0 - act(i) * *g.prob(i, x);
      }
      return 1.0 - fail;
    };
    return act(j);
  };
  double total = 0.0;
  for (const auto& [j, p] : brute_best_probs(g, v)) {
    if (!admitted(p, theta)) continue;
    total += p * (1.0 - (seeds.empty() ? 0.0 : activation(j)));
  }
  return total;
}

}  // namespace testing_support
