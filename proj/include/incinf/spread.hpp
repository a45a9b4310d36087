#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <thread>
#include <vector>

#include "incinf/error.hpp"
#include "incinf/graph.hpp"
#include "incinf/random.hpp"

namespace incinf {

struct SpreadEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t runs = 0;
};

namespace detail {

inline std::vector<NodeId> checked_seeds(const Snapshot& g, std::span<const NodeId> seeds) {
  std::vector<NodeId> out(seeds.begin(), seeds.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (NodeId s : out) {
    if (!g.contains(s)) throw UnknownNode(s);
  }
  return out;
}

/// One IC cascade. Edge (x, y) fires in run r iff a uniform keyed by
/// (master_seed, r, x, y) falls below p(x, y); each edge is tried at most once
/// per cascade, so this is exactly the live-edge model with a shared world
/// per run across every seed set.
inline std::uint32_t cascade(const Snapshot& g, std::span<const NodeId> seeds, std::uint64_t run_key,
                             std::vector<std::uint64_t>& mark, std::uint64_t stamp,
                             std::vector<NodeId>& frontier) {
  frontier.clear();
  for (NodeId s : seeds) {
    mark[s] = stamp;
    frontier.push_back(s);
  }
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    const NodeId x = frontier[head];
    for (const Arc& a : g.out_arcs(x)) {
      if (mark[a.node] == stamp) continue;
      if (to_unit(hash_key(run_key, edge_key(x, a.node))) < a.prob) {
        mark[a.node] = stamp;
        frontier.push_back(a.node);
      }
    }
  }
  return static_cast<std::uint32_t>(frontier.size());
}

}  // namespace detail

/// Monte-Carlo estimate of the expected number of nodes activated by `seeds`.
/// Run r depends only on (master_seed, r), so the result is bit-identical for
/// any `workers` count.
inline SpreadEstimate simulate_spread(const Snapshot& g, std::span<const NodeId> seeds, std::uint64_t runs,
                                      std::uint64_t master_seed, unsigned workers = 1) {
  if (runs == 0) throw InvalidConfig("runs must be positive");
  const auto seed_set = detail::checked_seeds(g, seeds);
  std::vector<std::uint32_t> counts(runs, 0);
  if (!seed_set.empty()) {
    auto work = [&](std::uint64_t begin, std::uint64_t end) {
      std::vector<std::uint64_t> mark(g.capacity(), 0);
      std::vector<NodeId> frontier;
      for (std::uint64_t r = begin; r < end; ++r) {
        counts[r] = detail::cascade(g, seed_set, hash_key(master_seed, r), mark, r + 1, frontier);
      }
    };
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::uint64_t>(runs, 256))));
    if (workers == 1) {
      work(0, runs);
    } else {
      std::vector<std::jthread> pool;
      const std::uint64_t chunk = (runs + workers - 1) / workers;
      for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t begin = w * chunk;
        const std::uint64_t end = std::min(runs, begin + chunk);
        if (begin < end) pool.emplace_back(work, begin, end);
      }
    }
  }
  // Reduce in run order so the floating-point result does not depend on partitioning.
  double sum = 0.0;
  for (auto c : counts) sum += c;
  const double mean = sum / static_cast<double>(runs);
  double sq = 0.0;
  for (auto c : counts) sq += (c - mean) * (c - mean);
  SpreadEstimate est;
  est.mean = mean;
  est.runs = runs;
  est.std_error = runs > 1 ? std::sqrt(sq / static_cast<double>(runs - 1) / static_cast<double>(runs)) : 0.0;
  return est;
}

inline constexpr std::size_t kExactSpreadEdgeCap = 25;

/// Exact expected spread by enumerating all 2^|E| live-edge subsets.
inline double exact_spread(const Snapshot& g, std::span<const NodeId> seeds) {
  const auto edges = g.edges();
  if (edges.size() > kExactSpreadEdgeCap) {
    throw TooLarge("exact_spread enumerates 2^|E| worlds; |E| = " + std::to_string(edges.size()) +
                   " exceeds " + std::to_string(kExactSpreadEdgeCap));
  }
  const auto seed_set = detail::checked_seeds(g, seeds);
  if (seed_set.empty()) return 0.0;

  const std::size_t m = edges.size();
  std::vector<std::vector<std::size_t>> out_edges(g.capacity());
  for (std::size_t e = 0; e < m; ++e) out_edges[edges[e].from].push_back(e);

  std::vector<std::uint64_t> mark(g.capacity(), 0);
  std::vector<NodeId> queue;
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    double weight = 1.0;
    for (std::size_t e = 0; e < m && weight > 0.0; ++e) {
      weight *= ((mask >> e) & 1) ? edges[e].prob : 1.0 - edges[e].prob;
    }
    if (weight == 0.0) continue;
    const std::uint64_t stamp = mask + 1;
    queue.assign(seed_set.begin(), seed_set.end());
    for (NodeId s : seed_set) mark[s] = stamp;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (std::size_t e : out_edges[queue[head]]) {
        if (((mask >> e) & 1) && mark[edges[e].to] != stamp) {
          mark[edges[e].to] = stamp;
          queue.push_back(edges[e].to);
        }
      }
    }
    total += weight * static_cast<double>(queue.size());
  }
  return total;
}

}  // namespace incinf
