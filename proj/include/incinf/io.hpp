#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "incinf/error.hpp"
#include "incinf/graph.hpp"
#include "incinf/random.hpp"

namespace incinf {

struct TemporalRecord {
  NodeId from;
  NodeId to;
  std::int64_t timestamp;
  std::optional<double> prob;
};

/// Parsed temporal edge list. Original string ids are kept in `names`
/// (indexed by NodeId, first-appearance order).
struct TemporalEdges {
  std::vector<TemporalRecord> records;
  std::vector<std::string> names;
  std::size_t self_loops_dropped = 0;
};

/// How edges without an explicit probability get one.
struct ProbPolicy {
  enum class Kind { fixed, trivalency };

  Kind kind = Kind::trivalency;
  double value = 0.1;
  std::uint64_t seed = 0;

  static ProbPolicy fixed(double p) {
    if (!(p > 0.0 && p <= 1.0)) throw InvalidProbability("fixed probability must be in (0, 1]");
    return {Kind::fixed, p, 0};
  }
  static ProbPolicy trivalency(std::uint64_t seed) { return {Kind::trivalency, 0.0, seed}; }

  /// Parses `fixed:<p>`, `trivalency` or `trivalency:<seed>`.
  static ProbPolicy parse(std::string_view text) {
    if (text.starts_with("fixed:")) return fixed(std::stod(std::string(text.substr(6))));
    if (text == "trivalency") return trivalency(0);
    if (text.starts_with("trivalency:")) return trivalency(std::stoull(std::string(text.substr(11))));
    throw InvalidConfig("unknown probability policy '" + std::string(text) + "'");
  }

  /// The draw depends only on (seed, u, v), so an edge keeps its probability
  /// in every snapshot it appears in.
  double assign(NodeId u, NodeId v) const {
    static constexpr std::array<double, 3> kLevels{0.1, 0.01, 0.001};
    if (kind == Kind::fixed) return value;
    return kLevels[hash_key(seed, edge_key(u, v)) % kLevels.size()];
  }
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r') ++end;
    fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

inline bool is_blank_or_comment(std::string_view line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

template <class T>
T parse_number(std::string_view field, std::size_t line, const char* what) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ParseError(line, std::string("invalid ") + what + " '" + std::string(field) + "'");
  }
  return value;
}

inline double parse_probability(std::string_view field, std::size_t line) {
  std::string text(field);
  char* end = nullptr;
  const double p = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) throw ParseError(line, "invalid probability '" + text + "'");
  return p;
}

}  // namespace detail

/// Reads `u <TAB> v <TAB> timestamp [<TAB> prob]` records. Ids are arbitrary
/// strings mapped densely in first-appearance order. Self-loops are dropped
/// and counted. With `undirected`, each record yields both directions.
inline TemporalEdges load_temporal_edges(std::istream& in, bool undirected = false) {
  TemporalEdges out;
  std::unordered_map<std::string, NodeId> ids;
  auto intern = [&](std::string_view name) {
    auto [it, inserted] = ids.try_emplace(std::string(name), static_cast<NodeId>(out.names.size()));
    if (inserted) out.names.emplace_back(name);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank_or_comment(line)) continue;
    const auto fields = detail::split_fields(line);
    if (fields.size() < 3 || fields.size() > 4) {
      throw ParseError(line_no, "expected 3 or 4 fields, got " + std::to_string(fields.size()));
    }
    const auto ts = detail::parse_number<std::int64_t>(fields[2], line_no, "timestamp");
    if (ts < 0) throw ParseError(line_no, "timestamp must be non-negative");
    std::optional<double> prob;
    if (fields.size() == 4) {
      prob = detail::parse_probability(fields[3], line_no);
      if (!(*prob > 0.0 && *prob <= 1.0)) {
        throw InvalidProbability("line " + std::to_string(line_no) + ": probability " +
                                 std::string(fields[3]) + " outside (0, 1]");
      }
    }
    const NodeId u = intern(fields[0]);
    const NodeId v = intern(fields[1]);
    if (u == v) {
      ++out.self_loops_dropped;
      continue;
    }
    out.records.push_back({u, v, ts, prob});
    if (undirected) out.records.push_back({v, u, ts, prob});
  }
  return out;
}

inline TemporalEdges load_temporal_edges(const std::string& path, bool undirected = false) {
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot open " + path);
  return load_temporal_edges(in, undirected);
}

/// Graph induced by every record with timestamp <= t. Repeated (u, v) records
/// collapse to the latest one; missing probabilities come from `policy`.
inline Snapshot snapshot_at(const TemporalEdges& edges, std::int64_t t, const ProbPolicy& policy) {
  std::map<std::pair<NodeId, NodeId>, const TemporalRecord*> latest;
  for (const auto& r : edges.records) {
    if (r.timestamp > t) continue;
    auto [it, inserted] = latest.try_emplace({r.from, r.to}, &r);
    if (!inserted && r.timestamp >= it->second->timestamp) it->second = &r;
  }
  std::vector<NodeId> nodes;
  for (const auto& [key, rec] : latest) {
    nodes.push_back(key.first);
    nodes.push_back(key.second);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  Snapshot g(t);
  for (NodeId u : nodes) g.apply(AddNode{u});
  for (const auto& [key, rec] : latest) {
    g.apply(AddEdge{key.first, key.second, rec->prob ? *rec->prob : policy.assign(key.first, key.second)});
  }
  return g;
}

inline void write_id_map(std::ostream& out, const TemporalEdges& edges) {
  for (std::size_t i = 0; i < edges.names.size(); ++i) out << i << '\t' << edges.names[i] << '\n';
}

/// Parses the change-stream format: one of `AN u`, `RN u`, `AE u v w`,
/// `RE u v`, `AW u v dw`, `DW u v dw` per line; `#` starts a comment.
inline ChangeStream read_change_stream(std::istream& in) {
  ChangeStream stream;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank_or_comment(line)) continue;
    const auto f = detail::split_fields(line);
    const std::string_view op = f[0];
    auto node = [&](std::size_t i) { return detail::parse_number<NodeId>(f[i], line_no, "node id"); };
    auto expect = [&](std::size_t n) {
      if (f.size() != n) {
        throw ParseError(line_no, std::string(op) + " expects " + std::to_string(n - 1) + " arguments");
      }
    };
    if (op == "AN") {
      expect(2);
      stream.push_back(AddNode{node(1)});
    } else if (op == "RN") {
      expect(2);
      stream.push_back(RemoveNode{node(1)});
    } else if (op == "AE") {
      expect(4);
      stream.push_back(AddEdge{node(1), node(2), detail::parse_probability(f[3], line_no)});
    } else if (op == "RE") {
      expect(3);
      stream.push_back(RemoveEdge{node(1), node(2)});
    } else if (op == "AW") {
      expect(4);
      stream.push_back(AddWeight{node(1), node(2), detail::parse_probability(f[3], line_no)});
    } else if (op == "DW") {
      expect(4);
      stream.push_back(DecWeight{node(1), node(2), detail::parse_probability(f[3], line_no)});
    } else {
      throw ParseError(line_no, "unknown change '" + std::string(op) + "'");
    }
  }
  return stream;
}

inline void write_change_stream(std::ostream& out, std::span<const TopologyChange> stream) {
  for (const auto& c : stream) out << to_string(c) << '\n';
}

/// A snapshot file is the change stream that builds the graph from empty,
/// preceded by a `# snapshot label=<t>` header.
inline void write_snapshot(std::ostream& out, const Snapshot& g) {
  out << "# snapshot label=" << g.label() << " nodes=" << g.node_count() << " edges=" << g.edge_count() << '\n';
  for (NodeId u : g.nodes()) out << to_string(AddNode{u}) << '\n';
  for (const auto& e : g.edges()) out << to_string(AddEdge{e.from, e.to, e.prob}) << '\n';
}

inline Snapshot read_snapshot(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::int64_t label = 0;
  if (auto pos = text.find("# snapshot label="); pos != std::string::npos) {
    label = std::stoll(text.substr(pos + 17));
  }
  std::istringstream body(text);
  Snapshot g(label);
  for (const auto& c : read_change_stream(body)) g.apply(c);
  return g;
}

inline Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot open " + path);
  return read_snapshot(in);
}

inline ChangeStream read_change_stream(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot open " + path);
  return read_change_stream(in);
}

}  // namespace incinf
