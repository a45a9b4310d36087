#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <type_traits>
#include <variant>
#include <vector>

#include "incinf/error.hpp"

namespace incinf {

/// Dense node index. A node keeps its id for the lifetime of an evolving network.
using NodeId = std::uint32_t;

/// One adjacency entry: the neighbor on the other side, the influence
/// probability, and its path length -log(prob).
struct Arc {
  NodeId node;
  double prob;
  double length;
};

struct Edge {
  NodeId from;
  NodeId to;
  double prob;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// The six basic topology operations.
struct AddNode {
  NodeId node;
};
struct RemoveNode {
  NodeId node;
};
struct AddEdge {
  NodeId from;
  NodeId to;
  double prob;
};
struct RemoveEdge {
  NodeId from;
  NodeId to;
};
struct AddWeight {
  NodeId from;
  NodeId to;
  double delta;
};
struct DecWeight {
  NodeId from;
  NodeId to;
  double delta;
};

using TopologyChange = std::variant<AddNode, RemoveNode, AddEdge, RemoveEdge, AddWeight, DecWeight>;
using ChangeStream = std::vector<TopologyChange>;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

/// Renders a change in the change-stream file syntax (`AE 0 1 0.5`).
inline std::string to_string(const TopologyChange& change) {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const AddNode& c) { os << "AN " << c.node; },
                 [&](const RemoveNode& c) { os << "RN " << c.node; },
                 [&](const AddEdge& c) { os << "AE " << c.from << ' ' << c.to << ' ' << c.prob; },
                 [&](const RemoveEdge& c) { os << "RE " << c.from << ' ' << c.to; },
                 [&](const AddWeight& c) { os << "AW " << c.from << ' ' << c.to << ' ' << c.delta; },
                 [&](const DecWeight& c) { os << "DW " << c.from << ' ' << c.to << ' ' << c.delta; },
             },
             change);
  return os.str();
}

inline bool operator==(const TopologyChange& a, const TopologyChange& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& lhs) {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(b);
        if constexpr (std::is_same_v<T, AddNode> || std::is_same_v<T, RemoveNode>) {
          return lhs.node == rhs.node;
        } else if constexpr (std::is_same_v<T, RemoveEdge>) {
          return lhs.from == rhs.from && lhs.to == rhs.to;
        } else if constexpr (std::is_same_v<T, AddEdge>) {
          return lhs.from == rhs.from && lhs.to == rhs.to && lhs.prob == rhs.prob;
        } else {
          return lhs.from == rhs.from && lhs.to == rhs.to && lhs.delta == rhs.delta;
        }
      },
      a);
}

namespace detail {

template <class G>
void validate_change(const G& g, const TopologyChange& change) {
  auto fail = [&](const std::string& reason) { throw PreconditionViolation(to_string(change), reason); };
  auto endpoints = [&](NodeId u, NodeId v) {
    if (!g.contains(u)) fail("dangling endpoint " + std::to_string(u));
    if (!g.contains(v)) fail("dangling endpoint " + std::to_string(v));
  };
  auto in_range = [&](double p) {
    if (!(p > 0.0 && p <= 1.0)) fail("probability out of range");
  };
  auto shifted = [&](NodeId u, NodeId v, double delta, double sign) {
    if (!(delta >= 0.0)) fail("negative weight delta");
    endpoints(u, v);
    const auto p = g.prob(u, v);
    if (!p) fail("edge absent");
    in_range(*p + sign * delta);
  };
  std::visit(Overloaded{
                 [&](const AddNode& c) {
                   if (g.contains(c.node)) fail("node already present");
                 },
                 [&](const RemoveNode& c) {
                   if (!g.contains(c.node)) fail("node absent");
                   if (!g.out_arcs(c.node).empty() || !g.in_arcs(c.node).empty()) fail("nonzero degree on node removal");
                 },
                 [&](const AddEdge& c) {
                   endpoints(c.from, c.to);
                   if (c.from == c.to) fail("self-loop");
                   in_range(c.prob);
                   if (g.has_edge(c.from, c.to)) fail("duplicate edge");
                 },
                 [&](const RemoveEdge& c) {
                   endpoints(c.from, c.to);
                   if (!g.has_edge(c.from, c.to)) fail("edge absent");
                 },
                 [&](const AddWeight& c) { shifted(c.from, c.to, c.delta, 1.0); },
                 [&](const DecWeight& c) { shifted(c.from, c.to, c.delta, -1.0); },
             },
             change);
}

}  // namespace detail

/// Directed graph with per-edge influence probabilities: one time point of an
/// evolving network.
///
/// Node ids index dense arrays; ids of removed nodes stay allocated but absent.
/// Every edge has probability in (0, 1], no self-loops, at most one edge per
/// ordered pair, and `in_arcs` mirrors `out_arcs` exactly.
class Snapshot {
 public:
  Snapshot() = default;
  explicit Snapshot(std::int64_t label) : label_(label) {}

  std::int64_t label() const noexcept { return label_; }
  void set_label(std::int64_t label) noexcept { label_ = label; }

  /// One past the largest id ever allocated.
  std::size_t capacity() const noexcept { return present_.size(); }
  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edge_count_; }
  bool empty() const noexcept { return node_count_ == 0; }

  bool contains(NodeId u) const noexcept { return u < present_.size() && present_[u] != 0; }

  std::span<const Arc> out_arcs(NodeId u) const { return out_[u]; }
  std::span<const Arc> in_arcs(NodeId u) const { return in_[u]; }
  std::size_t out_degree(NodeId u) const { return contains(u) ? out_[u].size() : 0; }
  std::size_t in_degree(NodeId u) const { return contains(u) ? in_[u].size() : 0; }

  std::optional<double> prob(NodeId u, NodeId v) const {
    if (!contains(u)) return std::nullopt;
    for (const Arc& a : out_[u]) {
      if (a.node == v) return a.prob;
    }
    return std::nullopt;
  }
  bool has_edge(NodeId u, NodeId v) const { return prob(u, v).has_value(); }

  /// Present node ids in ascending order.
  std::vector<NodeId> nodes() const {
    std::vector<NodeId> out;
    out.reserve(node_count_);
    for (NodeId u = 0; u < present_.size(); ++u) {
      if (present_[u]) out.push_back(u);
    }
    return out;
  }

  /// All edges sorted by (from, to).
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (NodeId u = 0; u < present_.size(); ++u) {
      for (const Arc& a : out_[u]) out.push_back({u, a.node, a.prob});
    }
    std::sort(out.begin(), out.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.from, a.to) < std::tie(b.from, b.to); });
    return out;
  }

  /// Throws PreconditionViolation when `change` is not valid against this graph.
  void validate(const TopologyChange& change) const { detail::validate_change(*this, change); }

  /// Applies one change in place. Throws PreconditionViolation and leaves the
  /// graph untouched when the change is not valid here.
  void apply(const TopologyChange& change) {
    validate(change);
    std::visit(Overloaded{
                   [&](const AddNode& c) {
                     reserve_id(c.node);
                     present_[c.node] = 1;
                     ++node_count_;
                   },
                   [&](const RemoveNode& c) {
                     present_[c.node] = 0;
                     --node_count_;
                   },
                   [&](const AddEdge& c) {
                     const double length = -std::log(c.prob);
                     out_[c.from].push_back({c.to, c.prob, length});
                     in_[c.to].push_back({c.from, c.prob, length});
                     ++edge_count_;
                   },
                   [&](const RemoveEdge& c) {
                     out_[c.from].erase(find_arc(out_[c.from], c.to));
                     in_[c.to].erase(find_arc(in_[c.to], c.from));
                     --edge_count_;
                   },
                   [&](const AddWeight& c) { set_weight(c.from, c.to, *prob(c.from, c.to) + c.delta); },
                   [&](const DecWeight& c) { set_weight(c.from, c.to, *prob(c.from, c.to) + -c.delta); },
               },
               change);
  }

  /// Convenience for building graphs: adds any missing endpoint nodes.
  void add_edge_auto(NodeId u, NodeId v, double p) {
    if (!contains(u)) apply(AddNode{u});
    if (!contains(v)) apply(AddNode{v});
    apply(AddEdge{u, v, p});
  }

  /// Verifies every structural invariant; returns a description of the first
  /// violation, or nothing.
  std::optional<std::string> audit() const {
    std::size_t nodes = 0, out_edges = 0, in_edges = 0;
    if (out_.size() != present_.size() || in_.size() != present_.size()) return "adjacency size mismatch";
    for (NodeId u = 0; u < present_.size(); ++u) {
      if (!present_[u]) {
        if (!out_[u].empty() || !in_[u].empty()) return "absent node " + std::to_string(u) + " has arcs";
        continue;
      }
      ++nodes;
      for (std::size_t a = 0; a < out_[u].size(); ++a) {
        const Arc& arc = out_[u][a];
        if (arc.node == u) return "self-loop at " + std::to_string(u);
        if (!contains(arc.node)) return "dangling edge " + std::to_string(u) + "->" + std::to_string(arc.node);
        if (!(arc.prob > 0.0 && arc.prob <= 1.0)) return "probability out of range";
        for (std::size_t b = a + 1; b < out_[u].size(); ++b) {
          if (out_[u][b].node == arc.node) return "parallel edge";
        }
        const auto& mirror = in_[arc.node];
        auto it = std::find_if(mirror.begin(), mirror.end(), [&](const Arc& m) { return m.node == u; });
        if (it == mirror.end() || it->prob != arc.prob) return "in/out mirror mismatch";
        ++out_edges;
      }
      in_edges += in_[u].size();
    }
    if (nodes != node_count_) return "node count mismatch";
    if (out_edges != edge_count_ || in_edges != edge_count_) return "edge count mismatch";
    return std::nullopt;
  }

  /// Same node set and same edges with identical probabilities. Labels and
  /// adjacency order are ignored.
  friend bool operator==(const Snapshot& a, const Snapshot& b) {
    return a.node_count_ == b.node_count_ && a.edge_count_ == b.edge_count_ && a.nodes() == b.nodes() &&
           a.edges() == b.edges();
  }

 private:
  void reserve_id(NodeId u) {
    if (u >= present_.size()) {
      present_.resize(std::size_t{u} + 1, 0);
      out_.resize(std::size_t{u} + 1);
      in_.resize(std::size_t{u} + 1);
    }
  }

  static std::vector<Arc>::iterator find_arc(std::vector<Arc>& arcs, NodeId v) {
    return std::find_if(arcs.begin(), arcs.end(), [v](const Arc& a) { return a.node == v; });
  }

  void set_weight(NodeId u, NodeId v, double updated) {
    const double length = -std::log(updated);
    *find_arc(out_[u], v) = {v, updated, length};
    *find_arc(in_[v], u) = {u, updated, length};
  }

  std::int64_t label_ = 0;
  std::vector<std::uint8_t> present_;
  std::vector<std::vector<Arc>> out_;
  std::vector<std::vector<Arc>> in_;
  std::size_t node_count_ = 0;
  std::size_t edge_count_ = 0;
};

/// Mutable view of a snapshot that copies an adjacency list only when a change
/// touches it. The base must outlive the overlay and stay unmodified.
class SnapshotOverlay {
 public:
  explicit SnapshotOverlay(const Snapshot& base)
      : base_(&base),
        present_(base.capacity(), 0),
        out_slot_(base.capacity(), 0),
        in_slot_(base.capacity(), 0),
        node_count_(base.node_count()),
        edge_count_(base.edge_count()) {
    for (NodeId u = 0; u < present_.size(); ++u) present_[u] = base.contains(u) ? 1 : 0;
  }

  std::size_t capacity() const noexcept { return present_.size(); }
  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edge_count_; }
  bool contains(NodeId u) const noexcept { return u < present_.size() && present_[u] != 0; }

  std::span<const Arc> out_arcs(NodeId u) const {
    if (out_slot_[u] != 0) return patches_[out_slot_[u] - 1];
    return u < base_->capacity() ? base_->out_arcs(u) : std::span<const Arc>{};
  }
  std::span<const Arc> in_arcs(NodeId u) const {
    if (in_slot_[u] != 0) return patches_[in_slot_[u] - 1];
    return u < base_->capacity() ? base_->in_arcs(u) : std::span<const Arc>{};
  }

  std::optional<double> prob(NodeId u, NodeId v) const {
    if (!contains(u)) return std::nullopt;
    for (const Arc& a : out_arcs(u)) {
      if (a.node == v) return a.prob;
    }
    return std::nullopt;
  }
  bool has_edge(NodeId u, NodeId v) const { return prob(u, v).has_value(); }

  void validate(const TopologyChange& change) const { detail::validate_change(*this, change); }

  /// Same semantics as Snapshot::apply.
  void apply(const TopologyChange& change) {
    validate(change);
    auto set_weight = [&](NodeId u, NodeId v, double updated) {
      const double length = -std::log(updated);
      *find_arc(own_out(u), v) = {v, updated, length};
      *find_arc(own_in(v), u) = {u, updated, length};
    };
    std::visit(Overloaded{
                   [&](const AddNode& c) {
                     if (c.node >= present_.size()) {
                       present_.resize(std::size_t{c.node} + 1, 0);
                       out_slot_.resize(present_.size(), 0);
                       in_slot_.resize(present_.size(), 0);
                     }
                     present_[c.node] = 1;
                     ++node_count_;
                   },
                   [&](const RemoveNode& c) {
                     present_[c.node] = 0;
                     --node_count_;
                   },
                   [&](const AddEdge& c) {
                     const double length = -std::log(c.prob);
                     own_out(c.from).push_back({c.to, c.prob, length});
                     own_in(c.to).push_back({c.from, c.prob, length});
                     ++edge_count_;
                   },
                   [&](const RemoveEdge& c) {
                     auto& out = own_out(c.from);
                     out.erase(find_arc(out, c.to));
                     auto& in = own_in(c.to);
                     in.erase(find_arc(in, c.from));
                     --edge_count_;
                   },
                   [&](const AddWeight& c) { set_weight(c.from, c.to, *prob(c.from, c.to) + c.delta); },
                   [&](const DecWeight& c) { set_weight(c.from, c.to, *prob(c.from, c.to) + -c.delta); },
               },
               change);
  }

 private:
  std::vector<Arc>& own(std::vector<std::uint32_t>& slots, std::span<const Arc> current, NodeId u) {
    if (slots[u] == 0) {
      patches_.emplace_back(current.begin(), current.end());
      slots[u] = static_cast<std::uint32_t>(patches_.size());
    }
    return patches_[slots[u] - 1];
  }
  std::vector<Arc>& own_out(NodeId u) { return own(out_slot_, out_arcs(u), u); }
  std::vector<Arc>& own_in(NodeId u) { return own(in_slot_, in_arcs(u), u); }

  static std::vector<Arc>::iterator find_arc(std::vector<Arc>& arcs, NodeId v) {
    return std::find_if(arcs.begin(), arcs.end(), [v](const Arc& a) { return a.node == v; });
  }

  const Snapshot* base_;
  std::vector<std::uint8_t> present_;
  std::vector<std::uint32_t> out_slot_;
  std::vector<std::uint32_t> in_slot_;
  std::deque<std::vector<Arc>> patches_;
  std::size_t node_count_;
  std::size_t edge_count_;
};

/// Returns `g` with `change` applied. Pass an rvalue to avoid the copy.
inline Snapshot apply_change(Snapshot g, const TopologyChange& change) {
  g.apply(change);
  return g;
}

inline Snapshot apply_all(Snapshot g, std::span<const TopologyChange> stream) {
  for (const auto& change : stream) g.apply(change);
  return g;
}

inline bool is_weight_change(const TopologyChange& c) {
  return std::holds_alternative<AddWeight>(c) || std::holds_alternative<DecWeight>(c);
}

/// Rewrites a weight change as RemoveEdge followed by AddEdge carrying the
/// updated probability (computed the same way `Snapshot::apply` does).
template <class G>
ChangeStream decompose_weight_change(const G& g, const TopologyChange& change) {
  NodeId u = 0, v = 0;
  double delta = 0.0;
  if (const auto* c = std::get_if<AddWeight>(&change)) {
    if (!(c->delta >= 0.0)) throw PreconditionViolation(to_string(change), "negative weight delta");
    u = c->from, v = c->to, delta = c->delta;
  } else if (const auto* c = std::get_if<DecWeight>(&change)) {
    if (!(c->delta >= 0.0)) throw PreconditionViolation(to_string(change), "negative weight delta");
    u = c->from, v = c->to, delta = -c->delta;
  } else {
    throw PreconditionViolation(to_string(change), "not a weight change");
  }
  const auto prior = g.prob(u, v);
  if (!prior || !g.contains(v)) throw PreconditionViolation(to_string(change), "edge absent");
  const double updated = *prior + delta;
  if (!(updated > 0.0 && updated <= 1.0)) {
    throw PreconditionViolation(to_string(change), "probability out of range");
  }
  return {RemoveEdge{u, v}, AddEdge{u, v, updated}};
}

/// Change stream turning `a` into `b`: node additions, edge removals, edge
/// additions and weight changes, then node removals.
///
/// A weight change is emitted as AddWeight/DecWeight when `old + delta`
/// reproduces the target probability bit-exactly, and as RemoveEdge + AddEdge
/// otherwise.
inline ChangeStream diff(const Snapshot& a, const Snapshot& b) {
  ChangeStream stream;
  const auto a_nodes = a.nodes();
  const auto b_nodes = b.nodes();
  for (NodeId u : b_nodes) {
    if (!a.contains(u)) stream.push_back(AddNode{u});
  }

  const auto a_edges = a.edges();
  const auto b_edges = b.edges();
  auto key = [](const Edge& e) { return std::pair(e.from, e.to); };

  std::vector<TopologyChange> removals, additions;
  std::size_t i = 0, j = 0;
  while (i < a_edges.size() || j < b_edges.size()) {
    if (j == b_edges.size() || (i < a_edges.size() && key(a_edges[i]) < key(b_edges[j]))) {
      removals.push_back(RemoveEdge{a_edges[i].from, a_edges[i].to});
      ++i;
    } else if (i == a_edges.size() || key(b_edges[j]) < key(a_edges[i])) {
      additions.push_back(AddEdge{b_edges[j].from, b_edges[j].to, b_edges[j].prob});
      ++j;
    } else {
      const Edge& old_e = a_edges[i];
      const Edge& new_e = b_edges[j];
      if (old_e.prob != new_e.prob) {
        if (new_e.prob > old_e.prob && old_e.prob + (new_e.prob - old_e.prob) == new_e.prob) {
          additions.push_back(AddWeight{old_e.from, old_e.to, new_e.prob - old_e.prob});
        } else if (new_e.prob < old_e.prob && old_e.prob + -(old_e.prob - new_e.prob) == new_e.prob) {
          additions.push_back(DecWeight{old_e.from, old_e.to, old_e.prob - new_e.prob});
        } else {
          removals.push_back(RemoveEdge{old_e.from, old_e.to});
          additions.push_back(AddEdge{new_e.from, new_e.to, new_e.prob});
        }
      }
      ++i, ++j;
    }
  }
  stream.insert(stream.end(), removals.begin(), removals.end());
  stream.insert(stream.end(), additions.begin(), additions.end());
  for (NodeId u : a_nodes) {
    if (!b.contains(u)) stream.push_back(RemoveNode{u});
  }
  return stream;
}

}  // namespace incinf
