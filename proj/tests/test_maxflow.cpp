#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace hstcut;

TEST(MaxFlow, SingleNode) {
  FlowGraph g(1);
  g.add_terminal_capacity(0, 5, 3);
  const MaxFlowResult r = max_flow(g);
  EXPECT_EQ(r.flow, 3.0);
  EXPECT_EQ(r.side[0], Side::source);
}

TEST(MaxFlow, EmptyGraph) {
  EXPECT_EQ(max_flow(FlowGraph(0)).flow, 0.0);
  FlowGraph g(3);
  const MaxFlowResult r = max_flow(g);
  EXPECT_EQ(r.flow, 0.0);
  for (Side s : r.side) EXPECT_EQ(s, Side::sink);
}

TEST(MaxFlow, TwoNodes) {
  FlowGraph g(2);
  g.add_terminal_capacity(0, 3, 2);
  g.add_terminal_capacity(1, 2, 3);
  g.add_arc(0, 1, 1);
  const MaxFlowResult r = max_flow(g);
  EXPECT_EQ(r.flow, oracle::min_cut(g));
  EXPECT_EQ(r.flow, 5.0);
}

TEST(MaxFlow, RejectsMalformed) {
  FlowGraph g(2);
  EXPECT_THROW(g.add_arc(0, 2, 1), std::out_of_range);
  EXPECT_THROW(g.add_arc(0, 0, 1), std::invalid_argument);
  EXPECT_THROW(g.add_arc(0, 1, -1), std::invalid_argument);
  EXPECT_THROW(g.add_terminal_capacity(1, -0.5, 0), std::invalid_argument);
  EXPECT_THROW(g.add_terminal_capacity(-1, 1, 0), std::out_of_range);
}

TEST(MaxFlow, CanonicalCutIsSourceReachableSet) {
  // Two minimum cuts of capacity 1: {0} or {0, 1} on the source side. Node 1
  // is not reachable in the residual graph once the arc saturates.
  FlowGraph g(2);
  g.add_terminal_capacity(0, 1, 0);
  g.add_arc(0, 1, 1);
  g.add_terminal_capacity(1, 0, 1);
  const MaxFlowResult r = max_flow(g);
  EXPECT_EQ(r.flow, 1.0);
  EXPECT_EQ(r.side[0], Side::sink);
  EXPECT_EQ(r.side[1], Side::sink);
}

FlowGraph random_graph(std::mt19937_64& rng, int n, double density) {
  std::uniform_int_distribution<int> cap(0, 9);
  std::bernoulli_distribution has(density);
  FlowGraph g(n);
  for (int v = 0; v < n; ++v) g.add_terminal_capacity(v, cap(rng), cap(rng));
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (u != v && has(rng)) g.add_arc(u, v, cap(rng));
  return g;
}

TEST(MaxFlow, MatchesExhaustiveMinCut) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 10;
    const FlowGraph g = random_graph(rng, n, trial % 3 == 0 ? 0.8 : 0.35);
    const MaxFlowResult r = max_flow(g);
    ASSERT_EQ(r.flow, oracle::min_cut(g)) << "trial " << trial;
    ASSERT_NEAR(cut_capacity(g, r.side), r.flow, 1e-9) << "trial " << trial;
  }
}

TEST(MaxFlow, RealCapacitiesCutConsistency) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> cap(0.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 30;
    FlowGraph g(n);
    for (int v = 0; v < n; ++v) g.add_terminal_capacity(v, cap(rng), cap(rng));
    for (int v = 0; v + 1 < n; ++v) {
      g.add_arc(v, v + 1, cap(rng));
      g.add_arc(v + 1, v, cap(rng));
    }
    for (int k = 0; k < 40; ++k) {
      const int u = static_cast<int>(rng() % n);
      const int v = static_cast<int>(rng() % n);
      if (u != v) g.add_arc(u, v, cap(rng));
    }
    const MaxFlowResult r = max_flow(g);
    EXPECT_NEAR(cut_capacity(g, r.side), r.flow, 1e-9);
  }
}

TEST(MaxFlow, Deterministic) {
  std::mt19937_64 rng(3);
  const FlowGraph g = random_graph(rng, 10, 0.4);
  const MaxFlowResult a = max_flow(g);
  const MaxFlowResult b = max_flow(g);
  EXPECT_EQ(a.flow, b.flow);
  EXPECT_EQ(a.side, b.side);
}

TEST(MaxFlow, LargeGrid) {
  // 4-connected grid with a known answer: every column carries one unit.
  const int rows = 60;
  const int cols = 60;
  FlowGraph g(rows * cols);
  for (int c = 0; c < cols; ++c) {
    g.add_terminal_capacity(c, 1, 0);
    g.add_terminal_capacity((rows - 1) * cols + c, 0, 1);
  }
  for (int r = 0; r + 1 < rows; ++r)
    for (int c = 0; c < cols; ++c) g.add_arc(r * cols + c, (r + 1) * cols + c, 2);
  EXPECT_DOUBLE_EQ(max_flow(g).flow, cols);
}
