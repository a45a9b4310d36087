#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "incinf/error.hpp"
#include "incinf/graph.hpp"
#include "incinf/localization.hpp"
#include "incinf/random.hpp"
#include "incinf/spread.hpp"

namespace incinf {

struct SelectionParams {
  std::size_t k = 0;
  std::optional<double> theta;
  std::optional<std::uint64_t> runs;
  std::optional<std::uint64_t> seed;
  std::optional<double> eta;
};

/// Ordered seed set with per-seed gains at selection time. For degree and
/// random selection the gain column holds the selection score (out-degree,
/// or 0).
struct SeedResult {
  std::vector<NodeId> seeds;
  std::vector<double> marginal_gains;
  std::string algorithm;
  std::chrono::nanoseconds wall_time{0};
  SelectionParams params;
  /// IncInf only: number of candidates evaluated in each iteration.
  std::vector<std::size_t> candidate_counts;
  /// IncInf only: candidates / |V| in each iteration.
  std::vector<double> pruning_ratios;
};

namespace detail {

inline std::size_t checked_k(const Snapshot& g, std::size_t k) {
  if (g.empty()) throw EmptyGraph();
  if (k == 0) throw InvalidConfig("K must be at least 1");
  return std::min(k, g.node_count());
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  std::chrono::nanoseconds elapsed() const { return std::chrono::steady_clock::now() - start_; }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Lazy-evaluation queue entry: `round` is the seed-set size the gain was
/// computed against. Ordered by gain, then smaller id first.
struct LazyEntry {
  double gain;
  NodeId node;
  std::size_t round;
};
struct LazyOrder {
  bool operator()(const LazyEntry& a, const LazyEntry& b) const {
    if (a.gain != b.gain) return a.gain < b.gain;
    return a.node > b.node;
  }
};
using LazyQueue = std::priority_queue<LazyEntry, std::vector<LazyEntry>, LazyOrder>;

}  // namespace detail

/// Memoized Monte-Carlo spread. Every estimate shares the live-edge worlds of
/// one master seed, so the estimate is itself a monotone submodular function
/// of the seed set, and marginal gains are exact integer differences.
class SpreadOracle {
 public:
  SpreadOracle(const Snapshot& g, std::uint64_t runs, std::uint64_t master_seed)
      : g_(g), runs_(runs), master_seed_(master_seed), mark_(g.capacity(), 0) {
    if (runs == 0) throw InvalidConfig("runs must be positive");
  }

  /// Total activated count over all runs.
  std::uint64_t total(std::vector<NodeId> seeds) {
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
    if (auto it = cache_.find(seeds); it != cache_.end()) return it->second;
    std::uint64_t sum = 0;
    if (!seeds.empty()) {
      for (std::uint64_t r = 0; r < runs_; ++r) {
        sum += detail::cascade(g_, seeds, hash_key(master_seed_, r), mark_, ++stamp_, frontier_);
      }
    }
    cache_.emplace(std::move(seeds), sum);
    ++evaluations_;
    return sum;
  }

  double gain(const std::vector<NodeId>& base, NodeId v) {
    auto with = base;
    with.push_back(v);
    const std::uint64_t a = total(with);
    const std::uint64_t b = total(base);
    return static_cast<double>(a - b) / static_cast<double>(runs_);
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  const Snapshot& g_;
  std::uint64_t runs_;
  std::uint64_t master_seed_;
  std::map<std::vector<NodeId>, std::uint64_t> cache_;
  std::vector<std::uint64_t> mark_;
  std::vector<NodeId> frontier_;
  std::uint64_t stamp_ = 0;
  std::size_t evaluations_ = 0;
};

/// Hill-climbing greedy on Monte-Carlo spread. With `lazy`, stale gains are
/// re-evaluated only when they reach the top of the queue.
inline SeedResult greedy_select(const Snapshot& g, std::size_t k, std::uint64_t runs, std::uint64_t master_seed,
                                bool lazy = true) {
  detail::Stopwatch clock;
  k = detail::checked_k(g, k);
  SpreadOracle oracle(g, runs, master_seed);
  SeedResult result;
  result.algorithm = "greedy";
  result.params = {k, std::nullopt, runs, master_seed, std::nullopt};
  const auto nodes = g.nodes();

  if (!lazy) {
    std::vector<std::uint8_t> chosen(g.capacity(), 0);
    for (std::size_t round = 0; round < k; ++round) {
      std::optional<NodeId> best;
      double best_gain = 0.0;
      for (NodeId v : nodes) {
        if (chosen[v]) continue;
        const double gain = oracle.gain(result.seeds, v);
        if (!best || gain > best_gain) best = v, best_gain = gain;
      }
      chosen[*best] = 1;
      result.seeds.push_back(*best);
      result.marginal_gains.push_back(best_gain);
    }
  } else {
    detail::LazyQueue queue;
    for (NodeId v : nodes) queue.push({oracle.gain({}, v), v, 0});
    while (result.seeds.size() < k) {
      auto top = queue.top();
      queue.pop();
      if (top.round == result.seeds.size()) {
        result.seeds.push_back(top.node);
        result.marginal_gains.push_back(top.gain);
      } else {
        queue.push({oracle.gain(result.seeds, top.node), top.node, result.seeds.size()});
      }
    }
  }
  result.wall_time = clock.elapsed();
  return result;
}

/// Localized-arborescence heuristic: K rounds of argmax mia_spread(g, v, S)
/// with lazy re-evaluation (gains only shrink as S grows).
inline SeedResult mia_select(const Snapshot& g, std::size_t k, double theta) {
  detail::Stopwatch clock;
  k = detail::checked_k(g, k);
  ActivationTable activation(g, theta);
  RegionSearch out_search(g.capacity());
  SeedResult result;
  result.algorithm = "mia";
  result.params = {k, theta, std::nullopt, std::nullopt, std::nullopt};

  detail::LazyQueue queue;
  for (NodeId v : g.nodes()) queue.push({activation.marginal_gain(g, v, out_search), v, 0});
  while (result.seeds.size() < k) {
    auto top = queue.top();
    queue.pop();
    if (top.round == result.seeds.size()) {
      result.seeds.push_back(top.node);
      result.marginal_gains.push_back(top.gain);
      activation.add_seed(g, top.node, out_search);
    } else {
      queue.push({activation.marginal_gain(g, top.node, out_search), top.node, result.seeds.size()});
    }
  }
  result.wall_time = clock.elapsed();
  return result;
}

/// Top-K by out-degree, ties to the smaller id.
inline SeedResult degree_select(const Snapshot& g, std::size_t k) {
  detail::Stopwatch clock;
  k = detail::checked_k(g, k);
  auto nodes = g.nodes();
  std::stable_sort(nodes.begin(), nodes.end(),
                   [&](NodeId a, NodeId b) { return g.out_degree(a) > g.out_degree(b); });
  SeedResult result;
  result.algorithm = "degree";
  result.params = {k, std::nullopt, std::nullopt, std::nullopt, std::nullopt};
  for (std::size_t i = 0; i < k; ++i) {
    result.seeds.push_back(nodes[i]);
    result.marginal_gains.push_back(static_cast<double>(g.out_degree(nodes[i])));
  }
  result.wall_time = clock.elapsed();
  return result;
}

/// K nodes sampled uniformly without replacement.
inline SeedResult random_select(const Snapshot& g, std::size_t k, std::uint64_t master_seed) {
  detail::Stopwatch clock;
  k = detail::checked_k(g, k);
  auto nodes = g.nodes();
  Rng rng(master_seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(nodes.size() - i);
    std::swap(nodes[i], nodes[j]);
  }
  SeedResult result;
  result.algorithm = "random";
  result.params = {k, std::nullopt, std::nullopt, master_seed, std::nullopt};
  result.seeds.assign(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(k));
  result.marginal_gains.assign(k, 0.0);
  result.wall_time = clock.elapsed();
  return result;
}

}  // namespace incinf
