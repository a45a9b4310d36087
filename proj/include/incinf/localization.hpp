#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "incinf/error.hpp"
#include "incinf/graph.hpp"

namespace incinf {

enum class Direction { out, in };

/// Influence threshold theta, applied to path lengths -log(prob). A path is
/// kept when its length is at most -log(theta) up to a relative 1e-12.
class Threshold {
 public:
  static constexpr double kRelativeTolerance = 1e-12;

  explicit Threshold(double theta) : theta_(theta) {
    if (!(theta > 0.0 && theta < 1.0)) throw InvalidConfig("theta must lie in (0, 1)");
    cutoff_ = -std::log(theta);
    limit_ = cutoff_ * (1.0 + kRelativeTolerance);
  }

  double theta() const noexcept { return theta_; }
  /// Largest admissible path length.
  double limit() const noexcept { return limit_; }
  bool admits(double length) const noexcept { return length <= limit_; }

 private:
  double theta_;
  double cutoff_;
  double limit_;
};

/// A node reached by a region expansion. `parent` is the next hop toward the
/// root (the root is its own parent); `parent_slot` indexes the parent inside
/// the member list. `edge_prob` is p(node, parent) for in-regions and
/// p(parent, node) for out-regions.
struct RegionMember {
  NodeId node;
  NodeId parent;
  std::uint32_t parent_slot;
  std::uint32_t hops;
  double length;
  double edge_prob;

  double prob() const { return std::exp(-length); }
};

/// Maximum-influence arborescence of `root` truncated at theta. Members are
/// listed in settle order, so every member appears after its parent.
struct LocalRegion {
  NodeId root = 0;
  Direction direction = Direction::out;
  double theta = 0.0;
  std::vector<RegionMember> members;

  std::size_t size() const { return members.size(); }

  const RegionMember* find(NodeId v) const {
    auto it = std::lower_bound(index_.begin(), index_.end(), v,
                               [](const auto& entry, NodeId key) { return entry.first < key; });
    if (it == index_.end() || it->first != v) return nullptr;
    return &members[it->second];
  }
  bool contains(NodeId v) const { return find(v) != nullptr; }

  void build_index() {
    index_.clear();
    index_.reserve(members.size());
    for (std::uint32_t i = 0; i < members.size(); ++i) index_.emplace_back(members[i].node, i);
    std::sort(index_.begin(), index_.end());
  }

 private:
  std::vector<std::pair<NodeId, std::uint32_t>> index_;
};

struct MaxInfluencePath {
  std::vector<NodeId> nodes;
  double prob = 1.0;
};

/// Reusable best-first expansion over -log(p) lengths. Holds dense scratch
/// arrays sized to the graph, reset in O(1) per search through a generation
/// stamp. Not thread-safe; use one per thread.
///
/// Ties on length are broken by fewer hops, then by the smaller node sequence
/// read from the root outward.
class RegionSearch {
 public:
  RegionSearch() = default;
  explicit RegionSearch(std::size_t capacity) { ensure(capacity); }

  /// Expands from `root` along out-arcs (Direction::out) or in-arcs
  /// (Direction::in), keeping nodes whose length is at most `limit`. Stops
  /// early once `target` is settled. The returned span stays valid until the
  /// next call.
  template <class G>
  std::span<const RegionMember> expand(const G& g, NodeId root, Direction dir, double limit,
                                       std::optional<NodeId> target = std::nullopt) {
    return expand_until(g, root, dir, limit, [&](NodeId x) { return target && *target == x; });
  }

  /// As expand, stopping right after a settled node for which `stop` is true.
  template <class G, class Stop>
  std::span<const RegionMember> expand_until(const G& g, NodeId root, Direction dir, double limit,
                                             Stop&& stop) {
    ensure(g.capacity());
    next_generation();
    members_.clear();
    heap_.clear();

    touch(root, 0.0, 0, root, 1.0);
    push(root);
    while (!heap_.empty()) {
      std::pop_heap(heap_.begin(), heap_.end(), HeapOrder{});
      const HeapEntry top = heap_.back();
      heap_.pop_back();
      const NodeId x = top.node;
      if (done_[x] == generation_ || top.length != length_[x] || top.hops != hops_[x]) continue;
      done_[x] = generation_;
      slot_[x] = static_cast<std::uint32_t>(members_.size());
      const NodeId parent = parent_[x];
      members_.push_back({x, parent, x == root ? 0u : slot_[parent], hops_[x], length_[x], edge_prob_[x]});
      if (stop(x)) break;

      const auto arcs = dir == Direction::out ? g.out_arcs(x) : g.in_arcs(x);
      for (const Arc& a : arcs) {
        const NodeId y = a.node;
        const double nl = length_[x] + a.length;
        if (nl > limit) continue;
        const std::uint32_t nh = hops_[x] + 1;
        if (seen_[y] != generation_) {
          touch(y, nl, nh, x, a.prob);
          push(y);
        } else if (done_[y] != generation_) {
          if (nl < length_[y] || (nl == length_[y] && nh < hops_[y])) {
            touch(y, nl, nh, x, a.prob);
            push(y);
          } else if (nl == length_[y] && nh == hops_[y] && prefers(x, parent_[y])) {
            parent_[y] = x;
            edge_prob_[y] = a.prob;
          }
        }
      }
    }
    return members_;
  }

  /// Member settled by the most recent expansion, if any.
  const RegionMember* settled(NodeId v) const {
    if (v >= done_.size() || done_[v] != generation_) return nullptr;
    return &members_[slot_[v]];
  }

  std::span<const RegionMember> members() const { return members_; }

 private:
  struct HeapEntry {
    double length;
    std::uint32_t hops;
    NodeId node;
  };
  struct HeapOrder {
    bool operator()(const HeapEntry& a, const HeapEntry& b) const {
      if (a.length != b.length) return a.length > b.length;
      if (a.hops != b.hops) return a.hops > b.hops;
      return a.node > b.node;
    }
  };

  void ensure(std::size_t capacity) {
    if (seen_.size() >= capacity) return;
    seen_.resize(capacity, 0);
    done_.resize(capacity, 0);
    length_.resize(capacity, 0.0);
    hops_.resize(capacity, 0);
    parent_.resize(capacity, 0);
    slot_.resize(capacity, 0);
    edge_prob_.resize(capacity, 0.0);
  }

  void next_generation() {
    if (++generation_ == 0) {
      std::fill(seen_.begin(), seen_.end(), 0);
      std::fill(done_.begin(), done_.end(), 0);
      generation_ = 1;
    }
  }

  void touch(NodeId v, double length, std::uint32_t hops, NodeId parent, double edge_prob) {
    seen_[v] = generation_;
    length_[v] = length;
    hops_[v] = hops;
    parent_[v] = parent;
    edge_prob_[v] = edge_prob;
  }

  void push(NodeId v) {
    heap_.push_back({length_[v], hops_[v], v});
    std::push_heap(heap_.begin(), heap_.end(), HeapOrder{});
  }

  // Both candidates are settled and sit at the same depth, so walking their
  // parent chains in lockstep finds the first position where the root-first
  // sequences differ.
  bool prefers(NodeId a, NodeId b) const {
    while (a != b && parent_[a] != parent_[b]) {
      a = parent_[a];
      b = parent_[b];
    }
    return a < b;
  }

  std::uint32_t generation_ = 0;
  std::vector<std::uint32_t> seen_;
  std::vector<std::uint32_t> done_;
  std::vector<double> length_;
  std::vector<std::uint32_t> hops_;
  std::vector<NodeId> parent_;
  std::vector<std::uint32_t> slot_;
  std::vector<double> edge_prob_;
  std::vector<HeapEntry> heap_;
  std::vector<RegionMember> members_;
};

namespace detail {

inline void require_node(const Snapshot& g, NodeId v) {
  if (!g.contains(v)) throw UnknownNode(v);
}

/// Seed membership over dense ids.
class SeedFlags {
 public:
  SeedFlags() = default;
  SeedFlags(std::size_t capacity, std::span<const NodeId> seeds) : flags_(capacity, 0) {
    for (NodeId s : seeds) set(s);
  }
  void set(NodeId v) {
    if (v >= flags_.size()) flags_.resize(std::size_t{v} + 1, 0);
    flags_[v] = 1;
  }
  bool operator()(NodeId v) const { return v < flags_.size() && flags_[v] != 0; }

 private:
  std::vector<std::uint8_t> flags_;
};

}  // namespace detail

/// Evaluates prob(j, S) bottom-up over an in-arborescence (members in settle
/// order, root first): 1 for seeds, otherwise 1 - prod_children(1 - prob(w, S) * p(w, parent)).
template <class IsSeed>
double activation_over_tree(std::span<const RegionMember> in_members, IsSeed&& is_seed,
                            std::vector<double>& scratch) {
  if (in_members.empty()) return 0.0;
  scratch.assign(in_members.size(), 1.0);
  double root_value = 0.0;
  for (std::size_t k = in_members.size(); k-- > 0;) {
    const RegionMember& m = in_members[k];
    const double value = is_seed(m.node) ? 1.0 : 1.0 - scratch[k];
    if (k == 0) {
      root_value = value;
    } else if (value > 0.0) {
      scratch[m.parent_slot] *= 1.0 - value * m.edge_prob;
    }
  }
  return root_value;
}

inline LocalRegion local_region(const Snapshot& g, NodeId root, Direction dir, double theta, RegionSearch& search) {
  detail::require_node(g, root);
  const Threshold th(theta);
  LocalRegion region;
  region.root = root;
  region.direction = dir;
  region.theta = theta;
  const auto members = search.expand(g, root, dir, th.limit());
  region.members.assign(members.begin(), members.end());
  region.build_index();
  return region;
}

/// The theta-truncated maximum-influence arborescence of `root`: with
/// Direction::out every v with prob(MIP(root, v)) >= theta, with Direction::in
/// every i with prob(MIP(i, root)) >= theta.
inline LocalRegion local_region(const Snapshot& g, NodeId root, Direction dir, double theta) {
  RegionSearch search(g.capacity());
  return local_region(g, root, dir, theta, search);
}

/// Maximum influence path from u to v, or nothing when no path reaches theta.
inline std::optional<MaxInfluencePath> mip(const Snapshot& g, NodeId u, NodeId v, double theta) {
  detail::require_node(g, u);
  detail::require_node(g, v);
  const Threshold th(theta);
  RegionSearch search(g.capacity());
  search.expand(g, u, Direction::out, th.limit(), v);
  const RegionMember* hit = search.settled(v);
  if (!hit) return std::nullopt;
  MaxInfluencePath path;
  path.prob = hit->prob();
  const auto members = search.members();
  for (std::uint32_t slot = static_cast<std::uint32_t>(hit - members.data());;) {
    path.nodes.push_back(members[slot].node);
    if (slot == 0) break;
    slot = members[slot].parent_slot;
  }
  std::reverse(path.nodes.begin(), path.nodes.end());
  return path;
}

/// prob(j, S) for the root j of an in-region.
inline double activation_prob(const LocalRegion& in_region, std::span<const NodeId> seeds) {
  if (in_region.direction != Direction::in) throw InvalidConfig("activation_prob needs an in-region");
  std::vector<NodeId> sorted(seeds.begin(), seeds.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> scratch;
  return activation_over_tree(
      in_region.members, [&](NodeId v) { return std::binary_search(sorted.begin(), sorted.end(), v); }, scratch);
}

inline double activation_prob(const Snapshot& g, NodeId j, std::span<const NodeId> seeds, double theta) {
  return activation_prob(local_region(g, j, Direction::in, theta), seeds);
}

/// Localized spread of v given seeds S: sum over the out-region of v of
/// prob(MIP(v, j)) * (1 - prob(j, S)).
inline double mia_spread(const Snapshot& g, NodeId v, std::span<const NodeId> seeds, double theta) {
  detail::require_node(g, v);
  const Threshold th(theta);
  RegionSearch out_search(g.capacity());
  const auto out = out_search.expand(g, v, Direction::out, th.limit());
  if (seeds.empty()) {
    double total = 0.0;
    for (const auto& m : out) total += m.prob();
    return total;
  }
  const detail::SeedFlags is_seed(g.capacity(), seeds);
  RegionSearch in_search(g.capacity());
  std::vector<double> scratch;
  double total = 0.0;
  for (const auto& m : out) {
    const double act = is_seed(m.node)
                           ? 1.0
                           : activation_over_tree(in_search.expand(g, m.node, Direction::in, th.limit()), is_seed,
                                                  scratch);
    total += m.prob() * (1.0 - act);
  }
  return total;
}

/// prob(j, S) for every node, maintained as seeds are added. Adding seed s
/// only invalidates nodes in the out-region of s, the only in-regions that
/// can contain s; invalidated entries are recomputed when next read.
class ActivationTable {
 public:
  ActivationTable(const Snapshot& g, double theta)
      : threshold_(theta),
        values_(g.capacity(), 0.0),
        fresh_(g.capacity(), 1),
        cover_(g.capacity(), 0),
        in_search_(g.capacity()) {}

  double value(const Snapshot& g, NodeId j) {
    if (j >= values_.size()) return 0.0;
    if (!fresh_[j]) {
      // only branches holding a seed matter; cover_ counts the seeds in reach
      std::uint32_t left = cover_[j];
      const auto tree = in_search_.expand_until(g, j, Direction::in, threshold_.limit(),
                                                [&](NodeId x) { return seeds_(x) && --left == 0; });
      values_[j] = activation_over_tree(tree, seeds_, scratch_);
      fresh_[j] = 1;
    }
    return values_[j];
  }
  bool is_seed(NodeId v) const { return seeds_(v); }
  const std::vector<NodeId>& seeds() const { return seed_list_; }

  void add_seed(const Snapshot& g, NodeId s, RegionSearch& out_search) {
    seeds_.set(s);
    seed_list_.push_back(s);
    if (values_.size() < g.capacity()) {
      values_.resize(g.capacity(), 0.0);
      fresh_.resize(g.capacity(), 1);
      cover_.resize(g.capacity(), 0);
    }
    for (const auto& m : out_search.expand(g, s, Direction::out, threshold_.limit())) {
      fresh_[m.node] = 0;
      ++cover_[m.node];
    }
    values_[s] = 1.0;
    fresh_[s] = 1;
  }

  /// mia_spread(g, v, S) against the current seed set.
  double marginal_gain(const Snapshot& g, NodeId v, RegionSearch& out_search) {
    double total = 0.0;
    for (const auto& m : out_search.expand(g, v, Direction::out, threshold_.limit())) {
      total += m.prob() * (1.0 - value(g, m.node));
    }
    return total;
  }

 private:
  Threshold threshold_;
  std::vector<double> values_;
  std::vector<std::uint8_t> fresh_;
  std::vector<std::uint32_t> cover_;
  detail::SeedFlags seeds_;
  std::vector<NodeId> seed_list_;
  RegionSearch in_search_;
  std::vector<double> scratch_;
};

}  // namespace incinf
