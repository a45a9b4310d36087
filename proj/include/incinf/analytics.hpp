#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "incinf/error.hpp"
#include "incinf/graph.hpp"

namespace incinf {

enum class DegreeKind { out, in, total };

inline std::size_t degree_of(const Snapshot& g, NodeId v, DegreeKind kind) {
  switch (kind) {
    case DegreeKind::out: return g.out_degree(v);
    case DegreeKind::in: return g.in_degree(v);
    case DegreeKind::total: return g.out_degree(v) + g.in_degree(v);
  }
  return 0;
}

/// Base-2 bin: degree 0 alone, then [1, 1], [2, 3], [4, 7], ...
struct DegreeBin {
  std::size_t lo = 0;
  std::size_t hi = 0;
  std::size_t count = 0;

  std::size_t width() const { return hi - lo + 1; }
};

inline std::size_t log2_bin(std::size_t degree) { return degree == 0 ? 0 : std::bit_width(degree); }

inline DegreeBin bin_bounds(std::size_t index) {
  if (index == 0) return {0, 0, 0};
  return {std::size_t{1} << (index - 1), (std::size_t{1} << index) - 1, 0};
}

/// Log-binned degree histogram, non-empty bins only; counts sum to |V|.
inline std::vector<DegreeBin> degree_distribution(const Snapshot& g, DegreeKind kind = DegreeKind::out) {
  std::vector<DegreeBin> bins;
  for (NodeId v : g.nodes()) {
    const std::size_t b = log2_bin(degree_of(g, v, kind));
    while (bins.size() <= b) bins.push_back(bin_bounds(bins.size()));
    ++bins[b].count;
  }
  std::erase_if(bins, [](const DegreeBin& b) { return b.count == 0; });
  return bins;
}

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

/// Least-squares line through (log bin center, log density) over non-empty
/// bins of positive degree. Density is count / bin width; the center is the
/// geometric mean of the bin bounds.
inline PowerLawFit fit_power_law(std::span<const DegreeBin> bins) {
  std::vector<double> xs, ys;
  for (const auto& b : bins) {
    if (b.lo == 0 || b.count == 0) continue;
    xs.push_back(0.5 * (std::log(static_cast<double>(b.lo)) + std::log(static_cast<double>(b.hi))));
    ys.push_back(std::log(static_cast<double>(b.count) / static_cast<double>(b.width())));
  }
  PowerLawFit fit;
  fit.points = xs.size();
  if (xs.size() < 2) return fit;
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  fit.slope = sxx > 0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

struct PaBucket {
  std::size_t lo = 0;
  std::size_t hi = 0;
  std::size_t samples = 0;
  double mean_new_edges = 0.0;
};

/// Buckets nodes present in both snapshots by their g_old degree (base-2
/// bins) and reports the mean number of in-edges each gained in g_new.
inline std::vector<PaBucket> pa_correlation(const Snapshot& g_old, const Snapshot& g_new,
                                            DegreeKind kind = DegreeKind::in) {
  std::vector<PaBucket> buckets;
  std::vector<double> sums;
  for (NodeId v : g_old.nodes()) {
    if (!g_new.contains(v)) continue;
    std::size_t gained = 0;
    for (const Arc& a : g_new.in_arcs(v)) {
      if (!g_old.has_edge(a.node, v)) ++gained;
    }
    const std::size_t b = log2_bin(degree_of(g_old, v, kind));
    while (buckets.size() <= b) {
      const auto bounds = bin_bounds(buckets.size());
      buckets.push_back({bounds.lo, bounds.hi, 0, 0.0});
      sums.push_back(0.0);
    }
    ++buckets[b].samples;
    sums[b] += static_cast<double>(gained);
  }
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    if (buckets[b].samples) buckets[b].mean_new_edges = sums[b] / static_cast<double>(buckets[b].samples);
  }
  std::erase_if(buckets, [](const PaBucket& b) { return b.samples == 0; });
  return buckets;
}

struct GrowthPoint {
  std::int64_t label = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
};

inline std::vector<GrowthPoint> growth_stats(std::span<const Snapshot> snapshots) {
  std::vector<GrowthPoint> out;
  out.reserve(snapshots.size());
  for (const auto& g : snapshots) out.push_back({g.label(), g.node_count(), g.edge_count()});
  return out;
}

/// 1-based rank of each seed by descending out-degree, ties to the smaller id.
inline std::vector<std::size_t> influence_degree_rank(const Snapshot& g, std::span<const NodeId> seeds) {
  auto order = g.nodes();
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return g.out_degree(a) > g.out_degree(b); });
  std::vector<std::size_t> rank(g.capacity(), 0);
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r + 1;
  std::vector<std::size_t> out;
  out.reserve(seeds.size());
  for (NodeId s : seeds) {
    if (!g.contains(s)) throw UnknownNode(s);
    out.push_back(rank[s]);
  }
  return out;
}

struct AnalyticsReport {
  std::vector<DegreeBin> degree_histogram;
  std::vector<PaBucket> pa_curve;
  std::vector<GrowthPoint> growth;
  std::vector<std::size_t> influence_degree_ranks;
};

/// Histogram and ranks on the last snapshot; PA curve over the last transition.
inline AnalyticsReport analyze(std::span<const Snapshot> snapshots, std::span<const NodeId> seeds) {
  AnalyticsReport report;
  report.growth = growth_stats(snapshots);
  if (snapshots.empty()) return report;
  const Snapshot& last = snapshots.back();
  report.degree_histogram = degree_distribution(last);
  if (snapshots.size() >= 2) report.pa_curve = pa_correlation(snapshots[snapshots.size() - 2], last);
  report.influence_degree_ranks = influence_degree_rank(last, seeds);
  return report;
}

}  // namespace incinf
