#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "incinf/error.hpp"
#include "incinf/graph.hpp"
#include "incinf/io.hpp"
#include "incinf/random.hpp"

namespace incinf {

struct GenConfig {
  std::size_t n0 = 10;
  /// Number of snapshots produced (steps - 1 transitions).
  std::size_t steps = 2;
  std::size_t nodes_per_step = 100;
  std::size_t m = 3;
  ProbPolicy prob_policy = ProbPolicy::trivalency(0);
  std::uint64_t master_seed = 0;

  /// Every attachment u -> t is mirrored by t -> u, so attractive nodes also
  /// gain out-degree. Disable for strictly one-way growth.
  bool reciprocal = true;

  /// Fraction of transitions that also carry churn (the settings below).
  double churn_fraction = 0.0;
  /// Per churn transition: edges added between existing nodes.
  std::size_t extra_edges = 0;
  /// Per churn transition: fraction of existing edges removed.
  double edge_removal_fraction = 0.0;
  /// Per churn transition: nodes removed together with their edges.
  std::size_t node_removals = 0;
  /// Per churn transition: edges whose probability is re-drawn.
  std::size_t weight_changes = 0;

  void validate() const {
    if (m < 1) throw InvalidConfig("m must be at least 1");
    if (n0 < m) throw InvalidConfig("n0 must be at least m");
    if (steps < 1) throw InvalidConfig("steps must be at least 1");
    if (!(churn_fraction >= 0.0 && churn_fraction <= 1.0)) throw InvalidConfig("churn_fraction must lie in [0, 1]");
    if (!(edge_removal_fraction >= 0.0 && edge_removal_fraction <= 1.0)) {
      throw InvalidConfig("edge_removal_fraction must lie in [0, 1]");
    }
  }
};

struct EvolvingGraph {
  std::vector<Snapshot> snapshots;
  /// streams[t] turns snapshots[t] into snapshots[t + 1].
  std::vector<ChangeStream> streams;
};

namespace detail {

/// Fenwick tree of non-negative integer weights with weighted sampling.
class WeightTree {
 public:
  explicit WeightTree(std::size_t n) : tree_(n + 1, 0), weights_(n, 0) {}

  void set(std::size_t i, std::int64_t w) {
    const std::int64_t change = w - weights_[i];
    weights_[i] = w;
    total_ += change;
    for (std::size_t k = i + 1; k < tree_.size(); k += k & (~k + 1)) tree_[k] += change;
  }
  void add(std::size_t i, std::int64_t change) { set(i, weights_[i] + change); }
  std::int64_t weight(std::size_t i) const { return weights_[i]; }
  std::int64_t total() const { return total_; }

  /// Index i with probability weight(i) / total().
  std::size_t sample(Rng& rng) const {
    auto target = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(total_)));
    std::size_t pos = 0;
    std::size_t step = std::bit_floor(tree_.size() - 1);
    for (; step > 0; step >>= 1) {
      if (pos + step < tree_.size() && tree_[pos + step] <= target) {
        pos += step;
        target -= tree_[pos];
      }
    }
    return pos;
  }

 private:
  std::vector<std::int64_t> tree_;
  std::vector<std::int64_t> weights_;
  std::int64_t total_ = 0;
};

class Grower {
 public:
  Grower(const GenConfig& cfg, std::size_t capacity)
      : cfg_(cfg), rng_(cfg.master_seed), attract_(capacity) {}

  Snapshot& graph() { return g_; }

  void record(const TopologyChange& change, ChangeStream* stream) {
    g_.apply(change);
    std::visit(Overloaded{
                   [&](const AddNode& c) { attract_.set(c.node, 1); },
                   [&](const RemoveNode& c) { attract_.set(c.node, 0); },
                   [&](const AddEdge& c) { attract_.add(c.to, 1); },
                   [&](const RemoveEdge& c) { attract_.add(c.to, -1); },
                   [&](const auto&) {},
               },
               change);
    if (stream) stream->push_back(change);
  }

  /// Adds node u attached to up to m distinct targets drawn proportionally
  /// to in-degree + 1 among nodes already present.
  void add_node(NodeId u, ChangeStream* stream) {
    const std::size_t existing = g_.node_count();
    record(AddNode{u}, stream);
    std::vector<NodeId> targets;
    if (existing <= cfg_.m) {
      for (NodeId v : g_.nodes()) {
        if (v != u) targets.push_back(v);
      }
    } else {
      while (targets.size() < cfg_.m) {
        const auto v = static_cast<NodeId>(attract_.sample(rng_));
        if (v != u && std::find(targets.begin(), targets.end(), v) == targets.end()) targets.push_back(v);
      }
    }
    for (NodeId v : targets) {
      record(AddEdge{u, v, cfg_.prob_policy.assign(u, v)}, stream);
      if (cfg_.reciprocal && !g_.has_edge(v, u)) record(AddEdge{v, u, cfg_.prob_policy.assign(v, u)}, stream);
    }
  }

  void churn(ChangeStream& stream) {
    auto nodes = g_.nodes();
    for (std::size_t n = 0; n < cfg_.extra_edges; ++n) add_extra_edge(stream, nodes);

    auto edges = g_.edges();
    const auto removals = static_cast<std::size_t>(cfg_.edge_removal_fraction * static_cast<double>(edges.size()));
    for (std::size_t n = 0; n < removals && !edges.empty(); ++n) {
      const std::size_t pick = rng_.below(edges.size());
      record(RemoveEdge{edges[pick].from, edges[pick].to}, &stream);
      edges[pick] = edges.back();
      edges.pop_back();
    }

    for (std::size_t n = 0; n < cfg_.node_removals && g_.node_count() > cfg_.m + 1; ++n) {
      const std::size_t pick = rng_.below(nodes.size());
      const NodeId v = nodes[pick];
      nodes[pick] = nodes.back();
      nodes.pop_back();
      const std::vector<Arc> outs(g_.out_arcs(v).begin(), g_.out_arcs(v).end());
      const std::vector<Arc> ins(g_.in_arcs(v).begin(), g_.in_arcs(v).end());
      for (const Arc& a : outs) record(RemoveEdge{v, a.node}, &stream);
      for (const Arc& a : ins) record(RemoveEdge{a.node, v}, &stream);
      record(RemoveNode{v}, &stream);
    }

    edges = g_.edges();
    static constexpr std::array<double, 3> kLevels{0.1, 0.01, 0.001};
    for (std::size_t n = 0; n < cfg_.weight_changes && !edges.empty(); ++n) {
      const Edge& e = edges[rng_.below(edges.size())];
      const double old = *g_.prob(e.from, e.to);
      double target = kLevels[rng_.below(kLevels.size())];
      while (target == old) target = kLevels[rng_.below(kLevels.size())];
      if (target > old) {
        record(AddWeight{e.from, e.to, target - old}, &stream);
      } else {
        record(DecWeight{e.from, e.to, old - target}, &stream);
      }
    }
  }

  Rng& rng() { return rng_; }

 private:
  void add_extra_edge(ChangeStream& stream, const std::vector<NodeId>& nodes) {
    if (nodes.size() < 2) return;
    for (int attempt = 0; attempt < 32; ++attempt) {
      const NodeId u = nodes[rng_.below(nodes.size())];
      const auto v = static_cast<NodeId>(attract_.sample(rng_));
      if (u == v || g_.has_edge(u, v)) continue;
      record(AddEdge{u, v, cfg_.prob_policy.assign(u, v)}, &stream);
      return;
    }
  }

  const GenConfig& cfg_;
  Rng rng_;
  WeightTree attract_;
  Snapshot g_;
};

}  // namespace detail

/// Preferential-attachment growth. Snapshot 0 holds n0 nodes, node i linked
/// to min(i, m) earlier nodes; each later snapshot adds nodes_per_step nodes
/// with m out-edges each, plus churn on a churn_fraction of transitions.
/// Streams are replayed onto the previous snapshot, so they are valid by
/// construction.
inline EvolvingGraph generate_evolving(const GenConfig& cfg) {
  cfg.validate();
  const std::size_t capacity = cfg.n0 + (cfg.steps - 1) * cfg.nodes_per_step;
  detail::Grower grower(cfg, capacity);
  EvolvingGraph out;

  for (NodeId u = 0; u < cfg.n0; ++u) grower.add_node(u, nullptr);
  grower.graph().set_label(0);
  out.snapshots.push_back(grower.graph());

  auto next_id = static_cast<NodeId>(cfg.n0);
  for (std::size_t t = 1; t < cfg.steps; ++t) {
    ChangeStream stream;
    for (std::size_t n = 0; n < cfg.nodes_per_step; ++n) grower.add_node(next_id++, &stream);
    if (cfg.churn_fraction > 0.0 && grower.rng().uniform() < cfg.churn_fraction) grower.churn(stream);
    grower.graph().set_label(static_cast<std::int64_t>(t));
    out.snapshots.push_back(grower.graph());
    out.streams.push_back(std::move(stream));
  }
  return out;
}

}  // namespace incinf
