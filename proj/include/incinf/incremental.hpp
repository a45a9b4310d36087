#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "incinf/error.hpp"
#include "incinf/graph.hpp"
#include "incinf/localization.hpp"
#include "incinf/selection.hpp"

namespace incinf {

/// Per-node change in localized spread accumulated over a change stream.
/// Nodes never touched have no entry and read as 0.
class DeltaTable {
 public:
  void add(NodeId v, double delta) { deltas_[v] += delta; }

  double operator[](NodeId v) const {
    auto it = deltas_.find(v);
    return it == deltas_.end() ? 0.0 : it->second;
  }
  bool has_entry(NodeId v) const { return deltas_.contains(v); }
  std::size_t size() const { return deltas_.size(); }
  bool empty() const { return deltas_.empty(); }

  void mark_removed(NodeId v) { removed_.insert(v); }
  void mark_added(NodeId v) { removed_.erase(v); }
  /// Removed by the stream and not re-added; never eligible for selection.
  bool removed(NodeId v) const { return removed_.contains(v); }

  /// Entries sorted by node id.
  std::vector<std::pair<NodeId, double>> entries() const {
    std::vector<std::pair<NodeId, double>> out(deltas_.begin(), deltas_.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Nodes with a nonzero delta, ascending.
  std::vector<NodeId> touched() const {
    std::vector<NodeId> out;
    for (const auto& [v, d] : deltas_) {
      if (d != 0.0) out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (const auto& [v, d] : deltas_) fn(v, d);
  }

 private:
  std::unordered_map<NodeId, double> deltas_;
  std::unordered_set<NodeId> removed_;
};

inline void write_delta_csv(std::ostream& out, const DeltaTable& table) {
  out.precision(17);
  out << "node,delta\n";
  for (const auto& [v, d] : table.entries()) out << v << ',' << d << '\n';
}

struct PruneConfig {
  /// Fraction of nodes (by out-degree, and by degree increase ratio) that
  /// qualify as high-degree candidates when a previous seed lost spread.
  double eta = 0.05;
  std::vector<NodeId> prev_seeds;
  /// When false every eligible node is a candidate.
  bool enabled = true;
  /// Allow fewer previous seeds than K; extra rounds search all nodes.
  bool pad = false;

  void validate() const {
    if (!(eta > 0.0 && eta <= 1.0)) throw InvalidConfig("eta must lie in (0, 1]");
  }
};

/// Two adjacent snapshots and the change stream between them.
struct EvolutionContext {
  Snapshot g_old;
  Snapshot g_new;
  ChangeStream stream;
  std::vector<std::size_t> degrees_old;
  std::vector<std::size_t> degrees_new;

  static EvolutionContext from_stream(Snapshot g_old, ChangeStream stream) {
    Snapshot g_new = apply_all(g_old, stream);
    g_new.set_label(g_old.label() + 1);
    return assemble(std::move(g_old), std::move(g_new), std::move(stream));
  }

  static EvolutionContext from_snapshots(Snapshot g_old, Snapshot g_new) {
    auto stream = diff(g_old, g_new);
    return assemble(std::move(g_old), std::move(g_new), std::move(stream));
  }

 private:
  static EvolutionContext assemble(Snapshot g_old, Snapshot g_new, ChangeStream stream) {
    EvolutionContext ctx{std::move(g_old), std::move(g_new), std::move(stream), {}, {}};
    const std::size_t cap = std::max(ctx.g_old.capacity(), ctx.g_new.capacity());
    ctx.degrees_old.assign(cap, 0);
    ctx.degrees_new.assign(cap, 0);
    for (NodeId v = 0; v < cap; ++v) {
      ctx.degrees_old[v] = ctx.g_old.out_degree(v);
      ctx.degrees_new[v] = ctx.g_new.out_degree(v);
    }
    return ctx;
  }
};

/// The four delta kernels (node add/remove, edge add, edge remove). Each
/// kernel reads the working graph before the change, records the change in
/// localized spread of every affected node, then advances the working graph.
///
/// Localized spread of i is the sum of prob(MIP(i, j)) * (1 - prob(j, S))
/// over j with prob(MIP(i, j)) >= theta. The seed factor is evaluated on the
/// pre-change graph.
class DeltaKernels {
 public:
  explicit DeltaKernels(double theta, std::span<const NodeId> seeds = {})
      : threshold_(theta), seeds_(seeds.begin(), seeds.end()) {
    for (NodeId s : seeds_) seed_flags_.set(s);
  }

  /// Dispatches one change. Weight changes are decomposed into RemoveEdge +
  /// AddEdge first.
  template <class G>
  void apply(G& working, const TopologyChange& change, DeltaTable& table) {
    if (is_weight_change(change)) {
      working.validate(change);
      for (const auto& part : decompose_weight_change(working, change)) apply(working, part, table);
      return;
    }
    std::visit(Overloaded{
                   [&](const AddEdge& c) { add_edge(working, c, table); },
                   [&](const RemoveEdge& c) { remove_edge(working, c, table); },
                   [&](const auto&) { node_change(working, change, table); },
               },
               change);
  }

  /// AddNode: the new node's spread goes from 0 to 1. RemoveNode (degree 0):
  /// from 1 to 0, and the node becomes ineligible.
  template <class G>
  static void node_change(G& working, const TopologyChange& change, DeltaTable& table) {
    working.apply(change);
    if (const auto* c = std::get_if<AddNode>(&change)) {
      table.add(c->node, 1.0);
      table.mark_added(c->node);
    } else if (const auto* c = std::get_if<RemoveNode>(&change)) {
      table.add(c->node, -1.0);
      table.mark_removed(c->node);
    } else {
      throw PreconditionViolation(to_string(change), "not a node change");
    }
  }

  /// Edge addition. Skipped when w < theta or w <= prob(MIP(u, v)). Otherwise
  /// for every i reaching u and every j reached from v, a new best path
  /// i -> u -> v -> j raises i's spread by the gain over the old MIP(i, j)
  /// (or by its full probability when the old MIP was below theta).
  template <class G>
  void add_edge(G& working, const AddEdge& e, DeltaTable& table) {
    working.validate(e);
    const double limit = threshold_.limit();
    const double edge_len = -std::log(e.prob);
    if (edge_len > limit) {
      working.apply(e);
      return;
    }
    out_search_.expand(working, e.from, Direction::out, edge_len, e.to);
    if (out_search_.settled(e.to)) {
      working.apply(e);
      return;
    }

    // Pairs whose combined length exceeds the limit cannot change, so both
    // sides are truncated at limit - edge_len.
    const double rest = limit - edge_len;
    collect(in_search_.expand(working, e.from, Direction::in, rest), sources_);
    collect(out_search_.expand(working, e.to, Direction::out, rest), sinks_);
    factors_.clear();

    // Both lists ascend by length, so the pairs within the limit form a
    // staircase. The first `split` sources get one out-expansion each; the
    // remaining pairs are covered by one in-expansion per sink. The split
    // minimizes the number of expansions.
    std::size_t split = sources_.size();
    std::size_t best = sources_.size();
    for (std::size_t s = 0, reach = sinks_.size(); s < sources_.size(); ++s) {
      while (reach > 0 && sources_[s].second + edge_len + sinks_[reach - 1].second > limit) --reach;
      if (s + reach < best) best = s + reach, split = s;
    }

    for (std::size_t k = 0; k < split; ++k) {
      const auto& [i, a] = sources_[k];
      out_search_.expand(working, i, Direction::out, limit);
      double gain = 0.0;
      for (const auto& [j, b] : sinks_) {
        const double cand = (a + edge_len) + b;
        if (cand > limit) break;
        const RegionMember* old = out_search_.settled(j);
        if (old && old->length <= cand) continue;
        gain += (std::exp(-cand) - (old ? old->prob() : 0.0)) * seed_factor(working, j);
      }
      if (gain != 0.0) table.add(i, gain);
    }
    if (split < sources_.size()) {
      gains_.assign(sources_.size(), 0.0);
      for (const auto& [j, b] : sinks_) {
        if (sources_[split].second + edge_len + b > limit) break;
        in_search_.expand(working, j, Direction::in, limit);
        double factor = -1.0;
        for (std::size_t k = split; k < sources_.size(); ++k) {
          const auto& [i, a] = sources_[k];
          const double cand = (a + edge_len) + b;
          if (cand > limit) break;
          const RegionMember* old = in_search_.settled(i);
          if (old && old->length <= cand) continue;
          if (factor < 0.0) factor = seed_factor(working, j);
          gains_[k] += (std::exp(-cand) - (old ? old->prob() : 0.0)) * factor;
        }
      }
      for (std::size_t k = split; k < sources_.size(); ++k) {
        if (gains_[k] != 0.0) table.add(sources_[k].first, gains_[k]);
      }
    }
    working.apply(e);
  }

  /// Edge removal. For every i reaching u whose arborescence routes v through
  /// (u, v), the MIPs to v and its descendants are recomputed after the
  /// removal; every other MIP of i survives unchanged.
  template <class G>
  void remove_edge(G& working, const RemoveEdge& e, DeltaTable& table) {
    working.validate(e);
    const double limit = threshold_.limit();
    double edge_len = 0.0;
    for (const Arc& a : working.out_arcs(e.from)) {
      if (a.node == e.to) edge_len = a.length;
    }
    if (edge_len > limit) {
      working.apply(e);
      return;
    }

    collect(in_search_.expand(working, e.from, Direction::in, limit - edge_len), sources_);
    affected_.clear();
    lost_.clear();
    factors_.clear();
    for (const auto& [i, a] : sources_) {
      const auto members = out_search_.expand(working, i, Direction::out, limit);
      const RegionMember* hit = out_search_.settled(e.to);
      if (!hit || hit->parent != e.from || hit->node == i) continue;
      const std::size_t first = lost_.size();
      const auto v_slot = static_cast<std::uint32_t>(hit - members.data());
      in_subtree_.assign(members.size(), 0);
      in_subtree_[v_slot] = 1;
      for (std::size_t k = v_slot; k < members.size(); ++k) {
        if (k != v_slot && !in_subtree_[members[k].parent_slot]) continue;
        in_subtree_[k] = 1;
        lost_.push_back({members[k].node, members[k].prob(), seed_factor(working, members[k].node)});
      }
      affected_.push_back({i, first, lost_.size()});
    }

    working.apply(e);
    for (const auto& span : affected_) {
      out_search_.expand(working, span.source, Direction::out, limit);
      double change = 0.0;
      for (std::size_t k = span.begin; k < span.end; ++k) {
        const RegionMember* now = out_search_.settled(lost_[k].node);
        change += ((now ? now->prob() : 0.0) - lost_[k].prob) * lost_[k].factor;
      }
      if (change != 0.0) table.add(span.source, change);
    }
  }

 private:
  struct Lost {
    NodeId node;
    double prob;
    double factor;
  };
  struct AffectedSource {
    NodeId source;
    std::size_t begin;
    std::size_t end;
  };

  static void collect(std::span<const RegionMember> members, std::vector<std::pair<NodeId, double>>& out) {
    out.clear();
    for (const auto& m : members) out.emplace_back(m.node, m.length);
  }

  template <class G>
  double seed_factor(const G& working, NodeId j) {
    if (seeds_.empty()) return 1.0;
    if (seed_flags_(j)) return 0.0;
    if (auto it = factors_.find(j); it != factors_.end()) return it->second;
    const double act = activation_over_tree(seed_search_.expand(working, j, Direction::in, threshold_.limit()),
                                            seed_flags_, scratch_);
    return factors_[j] = 1.0 - act;
  }

  Threshold threshold_;
  std::vector<NodeId> seeds_;
  detail::SeedFlags seed_flags_;
  RegionSearch out_search_, in_search_, seed_search_;
  std::vector<std::pair<NodeId, double>> sources_, sinks_;
  std::vector<double> gains_;
  std::vector<std::uint8_t> in_subtree_;
  std::vector<Lost> lost_;
  std::vector<AffectedSource> affected_;
  std::unordered_map<NodeId, double> factors_;
  std::vector<double> scratch_;
};

inline void delta_add_edge(Snapshot& working, const AddEdge& e, std::span<const NodeId> seeds, double theta,
                           DeltaTable& table) {
  DeltaKernels(theta, seeds).add_edge(working, e, table);
}

inline void delta_remove_edge(Snapshot& working, const RemoveEdge& e, std::span<const NodeId> seeds, double theta,
                              DeltaTable& table) {
  DeltaKernels(theta, seeds).remove_edge(working, e, table);
}

inline void delta_node(Snapshot& working, const TopologyChange& change, DeltaTable& table) {
  DeltaKernels::node_change(working, change, table);
}

/// Folds the delta kernels over the context's stream, starting from g_old.
inline DeltaTable accumulate_deltas(const EvolutionContext& ctx, std::span<const NodeId> seeds, double theta) {
  DeltaKernels kernels(theta, seeds);
  DeltaTable table;
  SnapshotOverlay working(ctx.g_old);
  for (const auto& change : ctx.stream) kernels.apply(working, change, table);
  return table;
}

/// Membership in the top-eta fraction of g_new by out-degree and by degree
/// increase ratio (degree_new / degree_old; +inf for nodes that had none).
/// Rank cut: ceil(eta * |V_new|), descending order, ties to the smaller id.
class PruneIndex {
 public:
  PruneIndex(const EvolutionContext& ctx, double eta) : top_degree_(ctx.g_new.capacity(), 0),
                                                        top_increase_(ctx.g_new.capacity(), 0) {
    const auto nodes = ctx.g_new.nodes();
    const auto cut = static_cast<std::size_t>(std::ceil(eta * static_cast<double>(nodes.size()) - 1e-9));
    auto ratio = [&](NodeId v) {
      const double now = static_cast<double>(ctx.degrees_new[v]);
      const double before = v < ctx.degrees_old.size() ? static_cast<double>(ctx.degrees_old[v]) : 0.0;
      if (before == 0.0) return now > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
      return now / before;
    };
    // Only membership in the top `cut` matters, so a partition suffices.
    auto top = [&](auto key) {
      auto order = nodes;
      const auto mid = order.begin() + static_cast<std::ptrdiff_t>(std::min(cut, order.size()));
      std::nth_element(order.begin(), mid, order.end(), [&](NodeId a, NodeId b) {
        const auto ka = key(a), kb = key(b);
        return ka != kb ? ka > kb : a < b;
      });
      order.erase(mid, order.end());
      return order;
    };
    const auto by_degree = top([&](NodeId v) { return ctx.degrees_new[v]; });
    const auto by_increase = top(ratio);
    for (NodeId v : by_degree) top_degree_[v] = 1;
    for (NodeId v : by_increase) top_increase_[v] = 1;
    high_ = by_degree;
    high_.insert(high_.end(), by_increase.begin(), by_increase.end());
    std::sort(high_.begin(), high_.end());
    high_.erase(std::unique(high_.begin(), high_.end()), high_.end());
  }

  bool high(NodeId v) const { return v < top_degree_.size() && (top_degree_[v] || top_increase_[v]); }
  bool top_degree(NodeId v) const { return v < top_degree_.size() && top_degree_[v]; }
  bool top_increase(NodeId v) const { return v < top_increase_.size() && top_increase_[v]; }
  /// Union of both top sets, ascending.
  const std::vector<NodeId>& high_nodes() const { return high_; }

 private:
  std::vector<std::uint8_t> top_degree_;
  std::vector<std::uint8_t> top_increase_;
  std::vector<NodeId> high_;
};

/// Candidate set for iteration `iteration` (1-based) given previous seed
/// S_i = cfg.prev_seeds[iteration - 1] and d = deltaInf[S_i]:
///   d >= 0: nodes with delta > d, plus S_i;
///   d <  0: the same, restricted to top-eta degree or increase-ratio nodes;
///   S_i no longer in g_new: every top-eta node.
/// Only nodes present in g_new are returned, ascending.
inline std::vector<NodeId> prune(const DeltaTable& table, const PruneConfig& cfg, const EvolutionContext& ctx,
                                 std::size_t iteration, const PruneIndex& index) {
  if (iteration == 0 || iteration > cfg.prev_seeds.size()) {
    throw InvalidConfig("prune iteration out of range of previous seeds");
  }
  const auto& g = ctx.g_new;
  const NodeId previous = cfg.prev_seeds[iteration - 1];
  std::vector<NodeId> out;
  if (!g.contains(previous)) {
    out = index.high_nodes();
  } else {
    const double d = table[previous];
    if (d >= 0.0) {
      table.for_each([&](NodeId v, double delta) {
        if (delta > d && g.contains(v)) out.push_back(v);
      });
    } else {
      for (NodeId v : index.high_nodes()) {
        if (table[v] > d && g.contains(v)) out.push_back(v);
      }
    }
    out.push_back(previous);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::vector<NodeId> prune(const DeltaTable& table, const PruneConfig& cfg, const EvolutionContext& ctx,
                                 std::size_t iteration) {
  cfg.validate();
  return prune(table, cfg, ctx, iteration, PruneIndex(ctx, cfg.eta));
}

/// Incremental top-K selection on g_new from the previous seeds. Deltas are
/// accumulated once per evolution step (against the empty seed set); each of
/// the K rounds prunes candidates from them and takes the argmax of the
/// localized marginal gain on g_new over the candidates, ties to the smaller
/// id. Candidate gains are evaluated lazily: a gain from an earlier round, or
/// the standalone spread of a candidate first seen after round 0, is an upper
/// bound for the current one.
inline SeedResult incinf_select(const EvolutionContext& ctx, const SeedResult& prev, std::size_t k, double theta,
                                const PruneConfig& config) {
  detail::Stopwatch clock;
  const Snapshot& g = ctx.g_new;
  k = detail::checked_k(g, k);
  PruneConfig cfg = config;
  cfg.validate();
  cfg.prev_seeds = prev.seeds;
  if (cfg.prev_seeds.size() < k && !cfg.pad) throw InsufficientSeeds(cfg.prev_seeds.size(), k);

  SeedResult result;
  result.algorithm = "incinf";
  result.params = {k, theta, std::nullopt, std::nullopt, cfg.eta};

  const DeltaTable table = accumulate_deltas(ctx, {}, theta);
  const PruneIndex index(ctx, cfg.eta);
  ActivationTable activation(g, theta);
  RegionSearch out_search(g.capacity());

  const std::size_t cap = g.capacity();
  constexpr std::size_t kUnseen = std::numeric_limits<std::size_t>::max();
  constexpr std::size_t kStandalone = kUnseen - 1;
  std::vector<double> bound(cap, 0.0);
  std::vector<std::size_t> bound_round(cap, kUnseen);
  std::vector<std::uint8_t> chosen(cap, 0);
  const auto all_nodes = g.nodes();

  const double limit = Threshold(theta).limit();
  auto gain_of = [&](NodeId v, std::size_t round) {
    bound[v] = activation.marginal_gain(g, v, out_search);
    bound_round[v] = round;
    return bound[v];
  };
  auto standalone_of = [&](NodeId v) {
    double total = 0.0;
    for (const auto& m : out_search.expand(g, v, Direction::out, limit)) total += m.prob();
    bound[v] = total;
    bound_round[v] = kStandalone;
    return total;
  };

  for (std::size_t round = 0; round < k; ++round) {
    std::vector<NodeId> candidates;
    if (round < cfg.prev_seeds.size() && cfg.enabled) {
      candidates = prune(table, cfg, ctx, round + 1, index);
    } else {
      candidates = all_nodes;
    }
    std::erase_if(candidates, [&](NodeId v) { return chosen[v] != 0; });
    if (candidates.empty()) {
      candidates = index.high_nodes();
      std::erase_if(candidates, [&](NodeId v) { return chosen[v] != 0 || !g.contains(v); });
    }
    if (candidates.empty()) {
      candidates = all_nodes;
      std::erase_if(candidates, [&](NodeId v) { return chosen[v] != 0; });
    }
    result.candidate_counts.push_back(candidates.size());
    result.pruning_ratios.push_back(static_cast<double>(candidates.size()) / static_cast<double>(g.node_count()));

    detail::LazyQueue queue;
    for (NodeId v : candidates) {
      if (bound_round[v] != kUnseen) {
        queue.push({bound[v], v, bound_round[v]});
      } else if (round == 0) {
        queue.push({gain_of(v, round), v, round});
      } else {
        queue.push({standalone_of(v), v, kStandalone});
      }
    }
    while (true) {
      auto top = queue.top();
      queue.pop();
      if (top.round == round) {
        chosen[top.node] = 1;
        result.seeds.push_back(top.node);
        result.marginal_gains.push_back(top.gain);
        activation.add_seed(g, top.node, out_search);
        break;
      }
      queue.push({gain_of(top.node, round), top.node, round});
    }
  }
  result.wall_time = clock.elapsed();
  return result;
}

}  // namespace incinf
