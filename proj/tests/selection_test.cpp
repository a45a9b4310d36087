#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "incinf/selection.hpp"
#include "support.hpp"

using namespace incinf;

namespace {

Snapshot star(NodeId leaves, double p, NodeId first = 0) {
  Snapshot g;
  g.apply(AddNode{first});
  for (NodeId i = 1; i <= leaves; ++i) g.add_edge_auto(first, first + i, p);
  return g;
}

}  // namespace

TEST(GreedySelect, TwoIsolatedNodes) {
  Snapshot g;
  g.apply(AddNode{0});
  g.apply(AddNode{1});
  const auto r = greedy_select(g, 2, 100, 1);
  EXPECT_EQ(r.seeds, (std::vector<NodeId>{0, 1}));
  EXPECT_EQ(r.marginal_gains, (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(r.algorithm, "greedy");
}

TEST(GreedySelect, DeterministicStar) {
  const auto r = greedy_select(star(5, 1.0), 1, 50, 3);
  EXPECT_EQ(r.seeds, std::vector<NodeId>{0});
  EXPECT_EQ(r.marginal_gains[0], 6.0);
}

TEST(GreedySelect, ChainGainAgainstExact) {
  Snapshot g;
  g.add_edge_auto(0, 1, 0.5);
  g.add_edge_auto(1, 2, 0.5);
  const auto r = greedy_select(g, 1, 200000, 5);
  ASSERT_EQ(r.seeds, std::vector<NodeId>{0});
  const std::vector<NodeId> seeds{0};
  const auto est = simulate_spread(g, seeds, 200000, 5);
  EXPECT_EQ(r.marginal_gains[0], est.mean);
  EXPECT_NEAR(r.marginal_gains[0], exact_spread(g, seeds), 3 * est.std_error);
}

TEST(GreedySelect, LazyMatchesNaive) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    const auto g = testing_support::random_graph(rng, 18, 0.15);
    const auto lazy = greedy_select(g, 5, 300, trial, true);
    const auto naive = greedy_select(g, 5, 300, trial, false);
    EXPECT_EQ(lazy.seeds, naive.seeds);
    EXPECT_EQ(lazy.marginal_gains, naive.marginal_gains);
    for (std::size_t i = 1; i < lazy.marginal_gains.size(); ++i) {
      EXPECT_LE(lazy.marginal_gains[i], lazy.marginal_gains[i - 1]);
    }
  }
}

TEST(GreedySelect, Errors) {
  EXPECT_THROW(greedy_select(Snapshot{}, 1, 10, 1), EmptyGraph);
  EXPECT_THROW(greedy_select(star(2, 0.5), 0, 10, 1), InvalidConfig);
}

TEST(MiaSelect, StarCenter) {
  const auto r = mia_select(star(5, 0.5), 1, 0.1);
  EXPECT_EQ(r.seeds, std::vector<NodeId>{0});
  EXPECT_DOUBLE_EQ(r.marginal_gains[0], 3.5);
}

TEST(MiaSelect, DisjointStars) {
  auto g = star(4, 0.5);
  for (const auto& e : star(6, 0.5, 10).edges()) g.add_edge_auto(e.from, e.to, e.prob);
  auto r = mia_select(g, 2, 0.1);
  std::sort(r.seeds.begin(), r.seeds.end());
  EXPECT_EQ(r.seeds, (std::vector<NodeId>{0, 10}));
}

TEST(MiaSelect, MatchesExhaustiveRecomputation) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 60; ++trial) {
    const auto g = testing_support::random_graph(rng, 8, 0.3);
    const auto r = mia_select(g, 4, 0.01);
    std::vector<NodeId> chosen;
    for (std::size_t round = 0; round < 4; ++round) {
      NodeId best = 0;
      double best_gain = -1.0;
      for (NodeId v : g.nodes()) {
        if (std::find(chosen.begin(), chosen.end(), v) != chosen.end()) continue;
        const double gain = testing_support::brute_mia_spread(g, v, chosen, 0.01);
        if (gain > best_gain + 1e-12) best = v, best_gain = gain;
      }
      ASSERT_EQ(r.seeds[round], best) << "trial " << trial << " round " << round;
      EXPECT_NEAR(r.marginal_gains[round], best_gain, 1e-9);
      chosen.push_back(best);
    }
  }
}

TEST(DegreeSelect, StarCenter) {
  const auto r = degree_select(star(4, 0.1), 1);
  EXPECT_EQ(r.seeds, std::vector<NodeId>{0});
  EXPECT_EQ(r.marginal_gains[0], 4.0);
}

TEST(Selection, KEqualToNodeCountSelectsAll) {
  std::mt19937_64 rng(33);
  const auto g = testing_support::random_graph(rng, 7, 0.3);
  for (auto r : {greedy_select(g, 7, 50, 1), mia_select(g, 7, 0.05), degree_select(g, 7), random_select(g, 7, 2)}) {
    std::sort(r.seeds.begin(), r.seeds.end());
    EXPECT_EQ(r.seeds, g.nodes()) << r.algorithm;
  }
  EXPECT_EQ(mia_select(g, 50, 0.05).seeds.size(), 7u);
}

TEST(RandomSelect, DeterministicAndDistinct) {
  std::mt19937_64 rng(34);
  const auto g = testing_support::random_graph(rng, 40, 0.05);
  const auto a = random_select(g, 10, 77);
  EXPECT_EQ(a.seeds, random_select(g, 10, 77).seeds);
  auto sorted = a.seeds;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(std::unique(sorted.begin(), sorted.end()), sorted.end());
  EXPECT_NE(a.seeds, random_select(g, 10, 78).seeds);
}

TEST(SpreadOracle, GainsAreExactDifferences) {
  std::mt19937_64 rng(35);
  const auto g = testing_support::random_graph(rng, 15, 0.2);
  SpreadOracle oracle(g, 400, 9);
  const std::vector<NodeId> base{1, 4};
  const auto with = simulate_spread(g, std::vector<NodeId>{1, 4, 7}, 400, 9).mean;
  const auto without = simulate_spread(g, base, 400, 9).mean;
  EXPECT_NEAR(oracle.gain(base, 7), with - without, 1e-9);
}
