#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <span>

#include "incinf/graph.hpp"
#include "support.hpp"

using namespace incinf;

namespace {

Snapshot pair_graph() {
  Snapshot g;
  g.apply(AddNode{0});
  g.apply(AddNode{1});
  return g;
}

}  // namespace

TEST(Snapshot, AddNodeOnEmptyGraph) {
  Snapshot g;
  g.apply(AddNode{0});
  EXPECT_EQ(g.node_count(), 1u);
  EXPECT_EQ(g.edge_count(), 0u);
  EXPECT_TRUE(g.contains(0));
  EXPECT_EQ(g.out_degree(0), 0u);
}

TEST(Snapshot, AddWeightIsAdditive) {
  auto g = pair_graph();
  g.apply(AddEdge{0, 1, 0.5});
  g.apply(AddWeight{0, 1, 0.3});
  EXPECT_DOUBLE_EQ(*g.prob(0, 1), 0.8);
  EXPECT_DOUBLE_EQ(g.in_arcs(1)[0].prob, 0.8);
  EXPECT_NEAR(g.out_arcs(0)[0].length, -std::log(0.8), 1e-15);
}

TEST(Snapshot, RemovingNodeWithEdgesIsRejected) {
  auto g = pair_graph();
  g.apply(AddEdge{0, 1, 0.5});
  EXPECT_THROW(g.apply(RemoveNode{0}), PreconditionViolation);
  EXPECT_THROW(g.apply(RemoveNode{1}), PreconditionViolation);
  EXPECT_TRUE(g.contains(0));
}

TEST(Snapshot, PreconditionsAreChecked) {
  auto g = pair_graph();
  EXPECT_THROW(g.apply(AddNode{0}), PreconditionViolation);
  EXPECT_THROW(g.apply(RemoveNode{7}), PreconditionViolation);
  EXPECT_THROW(g.apply(AddEdge{0, 2, 0.5}), PreconditionViolation);
  EXPECT_THROW(g.apply(AddEdge{0, 0, 0.5}), PreconditionViolation);
  EXPECT_THROW(g.apply(AddEdge{0, 1, 0.0}), PreconditionViolation);
  EXPECT_THROW(g.apply(AddEdge{0, 1, 1.5}), PreconditionViolation);
  EXPECT_THROW(g.apply(RemoveEdge{0, 1}), PreconditionViolation);
  EXPECT_THROW(g.apply(AddWeight{0, 1, 0.1}), PreconditionViolation);
  g.apply(AddEdge{0, 1, 0.5});
  EXPECT_THROW(g.apply(AddEdge{0, 1, 0.4}), PreconditionViolation);
  EXPECT_THROW(g.apply(AddWeight{0, 1, 0.6}), PreconditionViolation);
  EXPECT_THROW(g.apply(DecWeight{0, 1, 0.5}), PreconditionViolation);
  EXPECT_THROW(g.apply(AddWeight{0, 1, -0.1}), PreconditionViolation);
  EXPECT_EQ(g.audit(), std::nullopt);
  EXPECT_DOUBLE_EQ(*g.prob(0, 1), 0.5);
}

TEST(Snapshot, ViolationNamesChangeAndReason) {
  auto g = pair_graph();
  try {
    g.apply(AddEdge{0, 1, 2.0});
    FAIL();
  } catch (const PreconditionViolation& e) {
    EXPECT_EQ(e.change(), "AE 0 1 2");
    EXPECT_EQ(e.reason(), "probability out of range");
  }
}

TEST(Snapshot, RemovedIdCanReturn) {
  auto g = pair_graph();
  g.apply(RemoveNode{1});
  EXPECT_FALSE(g.contains(1));
  EXPECT_EQ(g.capacity(), 2u);
  g.apply(AddNode{1});
  EXPECT_TRUE(g.contains(1));
}

TEST(DecomposeWeightChange, AddWeight) {
  auto g = pair_graph();
  g.apply(AddEdge{0, 1, 0.5});
  const auto parts = decompose_weight_change(g, AddWeight{0, 1, 0.2});
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_TRUE(parts[0] == TopologyChange(RemoveEdge{0, 1}));
  const auto& add = std::get<AddEdge>(parts[1]);
  EXPECT_EQ(add.from, 0u);
  EXPECT_EQ(add.to, 1u);
  EXPECT_DOUBLE_EQ(add.prob, 0.7);
}

TEST(DecomposeWeightChange, DecWeight) {
  auto g = pair_graph();
  g.apply(AddEdge{0, 1, 0.3});
  const auto parts = decompose_weight_change(g, DecWeight{0, 1, 0.1});
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_TRUE(std::holds_alternative<RemoveEdge>(parts[0]));
  EXPECT_DOUBLE_EQ(std::get<AddEdge>(parts[1]).prob, 0.2);
}

TEST(DecomposeWeightChange, AbsentEdgeIsAnError) {
  auto g = pair_graph();
  EXPECT_THROW(decompose_weight_change(g, AddWeight{0, 1, 0.2}), PreconditionViolation);
}

TEST(DecomposeWeightChange, MatchesDirectApplication) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    auto g = pair_graph();
    const double p = std::uniform_real_distribution<double>(0.01, 0.99)(rng);
    g.apply(AddEdge{0, 1, p});
    const double d = std::uniform_real_distribution<double>(0.0, 1.0 - p)(rng);
    const TopologyChange change = trial % 2 ? TopologyChange(AddWeight{0, 1, d}) : TopologyChange(DecWeight{0, 1, d * p});
    auto direct = g;
    direct.apply(change);
    auto split = g;
    for (const auto& part : decompose_weight_change(g, change)) split.apply(part);
    EXPECT_EQ(*direct.prob(0, 1), *split.prob(0, 1));
  }
}

TEST(Diff, IdentityIsEmpty) {
  std::mt19937_64 rng(3);
  const auto g = testing_support::random_graph(rng, 12, 0.2);
  EXPECT_TRUE(diff(g, g).empty());
}

TEST(Diff, NodeAndEdgeAddition) {
  Snapshot a;
  a.apply(AddNode{0});
  Snapshot b = pair_graph();
  b.apply(AddEdge{0, 1, 0.5});
  const auto stream = diff(a, b);
  ASSERT_EQ(stream.size(), 2u);
  EXPECT_TRUE(stream[0] == TopologyChange(AddNode{1}));
  EXPECT_TRUE(stream[1] == TopologyChange(AddEdge{0, 1, 0.5}));
}

TEST(Diff, WeightIncrease) {
  auto a = pair_graph();
  a.apply(AddEdge{0, 1, 0.5});
  auto b = pair_graph();
  b.apply(AddEdge{0, 1, 0.7});
  const auto stream = diff(a, b);
  ASSERT_EQ(stream.size(), 1u);
  const auto& w = std::get<AddWeight>(stream[0]);
  EXPECT_NEAR(w.delta, 0.2, 1e-15);
  EXPECT_EQ(apply_all(a, stream), b);
}

TEST(Diff, RoundTripOnRandomPairs) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = testing_support::random_graph(rng, 2 + rng() % 15, 0.25);
    const auto stream = testing_support::random_stream(rng, a, 1 + rng() % 40);
    const auto b = apply_all(a, stream);
    ASSERT_EQ(b.audit(), std::nullopt);
    const auto d = diff(a, b);
    const auto replay = apply_all(a, d);
    ASSERT_EQ(replay, b) << "trial " << trial;
    for (const auto& e : b.edges()) ASSERT_EQ(*replay.prob(e.from, e.to), e.prob);
  }
}

TEST(Snapshot, MirrorStaysConsistentUnderRandomStreams) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = testing_support::random_graph(rng, 10, 0.3);
    for (const auto& c : testing_support::random_stream(rng, g, 60)) {
      g.apply(c);
      ASSERT_EQ(g.audit(), std::nullopt) << to_string(c);
    }
  }
}

TEST(Snapshot, RejectedChangeLeavesGraphUntouched) {
  std::mt19937_64 rng(5);
  auto g = testing_support::random_graph(rng, 8, 0.3);
  const auto before = g;
  for (NodeId u = 0; u < 8; ++u) {
    EXPECT_THROW(g.apply(AddNode{u}), PreconditionViolation);
    if (g.out_degree(u) > 0) {
      EXPECT_THROW(g.apply(RemoveNode{u}), PreconditionViolation);
    }
  }
  EXPECT_EQ(g, before);
}

TEST(SnapshotOverlay, TracksSnapshotAndLeavesBaseAlone) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto base = testing_support::random_graph(rng, 10, 0.3);
    const auto copy = base;
    auto g = base;
    SnapshotOverlay overlay(base);
    for (const auto& c : testing_support::random_stream(rng, base, 60)) {
      g.apply(c);
      overlay.apply(c);
    }
    ASSERT_EQ(base, copy);
    ASSERT_EQ(overlay.node_count(), g.node_count());
    ASSERT_EQ(overlay.edge_count(), g.edge_count());
    ASSERT_EQ(overlay.capacity(), g.capacity());
    for (NodeId u = 0; u < g.capacity(); ++u) {
      ASSERT_EQ(overlay.contains(u), g.contains(u));
      auto key = [](std::span<const Arc> arcs) {
        std::vector<std::pair<NodeId, double>> out;
        for (const Arc& a : arcs) out.emplace_back(a.node, a.prob);
        std::sort(out.begin(), out.end());
        return out;
      };
      EXPECT_EQ(key(overlay.out_arcs(u)), key(g.out_arcs(u)));
      EXPECT_EQ(key(overlay.in_arcs(u)), key(g.in_arcs(u)));
    }
  }
}

TEST(SnapshotOverlay, RejectsWhatSnapshotRejects) {
  const auto g = pair_graph();
  SnapshotOverlay overlay(g);
  overlay.apply(AddEdge{0, 1, 0.5});
  EXPECT_THROW(overlay.apply(AddEdge{0, 1, 0.5}), PreconditionViolation);
  EXPECT_THROW(overlay.apply(RemoveNode{0}), PreconditionViolation);
  EXPECT_THROW(overlay.apply(AddWeight{0, 1, 0.6}), PreconditionViolation);
  EXPECT_EQ(overlay.edge_count(), 1u);
  EXPECT_EQ(g.edge_count(), 0u);
}

TEST(ChangeText, RoundTripsThroughToString) {
  EXPECT_EQ(to_string(AddNode{3}), "AN 3");
  EXPECT_EQ(to_string(RemoveEdge{1, 2}), "RE 1 2");
  EXPECT_EQ(to_string(DecWeight{1, 2, 0.25}), "DW 1 2 0.25");
}
