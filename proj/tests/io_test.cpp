#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "incinf/io.hpp"
#include "support.hpp"

using namespace incinf;

namespace {

TemporalEdges three_lines() {
  std::istringstream in("a\tb\t10\nb\tc\t20\nc\ta\t30\n");
  return load_temporal_edges(in);
}

}  // namespace

TEST(TemporalEdges, IdsAreInternedInFirstAppearanceOrder) {
  const auto edges = three_lines();
  ASSERT_EQ(edges.names.size(), 3u);
  EXPECT_EQ(edges.names[0], "a");
  EXPECT_EQ(edges.names[2], "c");
  ASSERT_EQ(edges.records.size(), 3u);
  EXPECT_EQ(edges.records[1].from, 1u);
  EXPECT_EQ(edges.records[1].to, 2u);
  EXPECT_EQ(edges.records[1].timestamp, 20);
}

TEST(TemporalEdges, BeforeEveryTimestampGivesEmptySnapshot) {
  const auto g = snapshot_at(three_lines(), 5, ProbPolicy::fixed(0.1));
  EXPECT_TRUE(g.empty());
  EXPECT_EQ(g.label(), 5);
}

TEST(TemporalEdges, AfterEveryTimestampGivesFullGraph) {
  const auto g = snapshot_at(three_lines(), 30, ProbPolicy::fixed(0.1));
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_count(), 3u);
  EXPECT_DOUBLE_EQ(*g.prob(2, 0), 0.1);
}

TEST(TemporalEdges, PartialPrefix) {
  const auto g = snapshot_at(three_lines(), 20, ProbPolicy::fixed(0.1));
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_FALSE(g.has_edge(2, 0));
}

TEST(TemporalEdges, TrivalencyDrawsFromThreeLevels) {
  std::ostringstream text;
  for (int i = 0; i < 200; ++i) text << i << '\t' << (i * 7 + 1) % 200 << '\t' << i << '\n';
  std::istringstream in(text.str());
  const auto edges = load_temporal_edges(in);
  const auto g = snapshot_at(edges, 1000, ProbPolicy::trivalency(42));
  std::set<double> seen;
  for (const auto& e : g.edges()) {
    EXPECT_TRUE(e.prob == 0.1 || e.prob == 0.01 || e.prob == 0.001) << e.prob;
    seen.insert(e.prob);
  }
  EXPECT_EQ(seen.size(), 3u);
  EXPECT_EQ(g, snapshot_at(edges, 1000, ProbPolicy::trivalency(42)));
}

TEST(TemporalEdges, ExplicitProbabilityWinsAndLatestRecordCounts) {
  std::istringstream in("0 1 1 0.5\n0 1 4 0.25\n0 1 9 0.75\n");
  const auto edges = load_temporal_edges(in);
  EXPECT_DOUBLE_EQ(*snapshot_at(edges, 5, ProbPolicy::fixed(0.1)).prob(0, 1), 0.25);
  EXPECT_DOUBLE_EQ(*snapshot_at(edges, 9, ProbPolicy::fixed(0.1)).prob(0, 1), 0.75);
}

TEST(TemporalEdges, Errors) {
  std::istringstream short_line("a b\n");
  EXPECT_THROW(load_temporal_edges(short_line), ParseError);
  std::istringstream bad_ts("a b x\n");
  try {
    load_temporal_edges(bad_ts);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
  std::istringstream bad_prob("# header\na b 3 1.5\n");
  EXPECT_THROW(load_temporal_edges(bad_prob), InvalidProbability);
  std::istringstream zero_prob("a b 3 0\n");
  EXPECT_THROW(load_temporal_edges(zero_prob), InvalidProbability);
  std::istringstream negative_ts("a b -3\n");
  EXPECT_THROW(load_temporal_edges(negative_ts), ParseError);
}

TEST(TemporalEdges, SelfLoopsAreDroppedAndCounted) {
  std::istringstream in("a a 1\na b 2\n");
  const auto edges = load_temporal_edges(in);
  EXPECT_EQ(edges.self_loops_dropped, 1u);
  EXPECT_EQ(edges.records.size(), 1u);
}

TEST(TemporalEdges, UndirectedEmitsBothDirections) {
  std::istringstream in("a b 1\n");
  const auto g = snapshot_at(load_temporal_edges(in, true), 1, ProbPolicy::fixed(0.2));
  EXPECT_TRUE(g.has_edge(0, 1));
  EXPECT_TRUE(g.has_edge(1, 0));
}

TEST(ProbPolicy, Parse) {
  EXPECT_EQ(ProbPolicy::parse("fixed:0.3").kind, ProbPolicy::Kind::fixed);
  EXPECT_DOUBLE_EQ(ProbPolicy::parse("fixed:0.3").value, 0.3);
  EXPECT_EQ(ProbPolicy::parse("trivalency:9").seed, 9u);
  EXPECT_THROW(ProbPolicy::parse("uniform"), InvalidConfig);
  EXPECT_THROW(ProbPolicy::parse("fixed:0"), InvalidProbability);
}

TEST(ChangeStreamFile, RoundTrip) {
  std::mt19937_64 rng(8);
  const auto g = testing_support::random_graph(rng, 10, 0.3);
  const auto stream = testing_support::random_stream(rng, g, 80);
  std::stringstream buffer;
  write_change_stream(buffer, stream);
  const auto back = read_change_stream(buffer);
  ASSERT_EQ(back.size(), stream.size());
  for (std::size_t i = 0; i < back.size(); ++i) EXPECT_TRUE(back[i] == stream[i]) << to_string(stream[i]);
}

TEST(ChangeStreamFile, ErrorsCarryLineNumbers) {
  std::istringstream in("AN 1\n\nXX 2\n");
  try {
    read_change_stream(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::istringstream arity("AE 1 2\n");
  EXPECT_THROW(read_change_stream(arity), ParseError);
}

TEST(SnapshotFile, RoundTrip) {
  std::mt19937_64 rng(9);
  auto g = testing_support::random_graph(rng, 20, 0.2);
  g.apply(AddNode{99});
  g.set_label(17);
  std::stringstream buffer;
  write_snapshot(buffer, g);
  const auto back = read_snapshot(buffer);
  EXPECT_EQ(back, g);
  EXPECT_EQ(back.label(), 17);
  for (const auto& e : g.edges()) EXPECT_EQ(*back.prob(e.from, e.to), e.prob);
}
