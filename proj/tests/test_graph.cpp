#include <gtest/gtest.h>

#include <cmath>

#include "manie/error.hpp"
#include "manie/graph.hpp"

using namespace manie;

namespace {

void expect_well_formed(const Network& g) {
  EXPECT_TRUE(g.adj.diagonal().isZero(0.0));
  EXPECT_TRUE(g.adj.allFinite());
  EXPECT_GE(g.adj.minCoeff(), 0.0);
  if (!g.directed) {
    EXPECT_TRUE(g.adj.isApprox(g.adj.transpose(), 0.0));
  }
}

}  // namespace

TEST(GenEr, ExtremeProbabilities) {
  EXPECT_EQ(gen_er(5, 0.0, false, 3).edge_count(), 0u);
  EXPECT_EQ(gen_er(5, 1.0, false, 3).edge_count(), 10u);
  EXPECT_EQ(gen_er(5, 1.0, true, 3).edge_count(), 20u);
}

TEST(GenEr, PinnedEdgeCount) {
  const auto g = gen_er(40, 0.1, false, 7);
  EXPECT_EQ(g.size(), 40);
  EXPECT_EQ(g.edge_count(), 87u);
}

TEST(GenEr, RejectsBadProbability) {
  EXPECT_THROW(gen_er(5, -0.1, false, 1), ParameterError);
  EXPECT_THROW(gen_er(5, 1.5, false, 1), ParameterError);
  EXPECT_THROW(gen_er(0, 0.5, false, 1), ParameterError);
}

TEST(GenEr, MeanEdgeCountWithinThreeSigma) {
  const int n = 40;
  const double p = 0.1;
  const double pairs = n * (n - 1) / 2.0;
  double sum = 0.0;
  const int reps = 200;
  for (int s = 0; s < reps; ++s) sum += static_cast<double>(gen_er(n, p, false, 1000 + s).edge_count());
  const double sigma_of_mean = std::sqrt(pairs * p * (1 - p) / reps);
  EXPECT_NEAR(sum / reps, p * pairs, 3 * sigma_of_mean);
}

TEST(GenBa, EdgeCounts) {
  EXPECT_EQ(gen_ba(5, 1, 2).edge_count(), 4u);
  EXPECT_EQ(gen_ba(40, 2, 2).edge_count(), 77u);
  EXPECT_THROW(gen_ba(3, 2, 2), ParameterError);
  EXPECT_THROW(gen_ba(5, 0, 2), ParameterError);
}

TEST(GenBa, EveryLateNodeAttachesMEdges) {
  // Nodes are added in index order, so node k's links to lower indices are
  // exactly the ones made at its insertion.
  const int m = 3;
  const auto g = gen_ba(30, m, 11);
  for (Eigen::Index k = m + 1; k < g.size(); ++k) {
    EXPECT_EQ((g.adj.row(k).head(k).array() != 0.0).count(), m) << "node " << k;
  }
}

TEST(SmallWorld, ZeroProbabilityIsTheRingLattice) {
  const auto ws = gen_ws(10, 4, 0.0, 5);
  const auto nw = gen_nw(10, 4, 0.0, 5);
  EXPECT_EQ(ws.edge_count(), 20u);
  EXPECT_EQ(nw, ws);
  for (Eigen::Index i = 0; i < 10; ++i) {
    EXPECT_TRUE(ws.has_edge(i, (i + 1) % 10));
    EXPECT_TRUE(ws.has_edge(i, (i + 2) % 10));
    EXPECT_FALSE(ws.has_edge(i, (i + 3) % 10));
  }
}

TEST(SmallWorld, NewmanWattsOnlyAddsEdges) {
  const auto g = gen_nw(40, 4, 0.3, 7);
  EXPECT_GE(g.edge_count(), 80u);
  const auto lattice = gen_nw(40, 4, 0.0, 7);
  EXPECT_TRUE(((lattice.adj.array() != 0.0) <= (g.adj.array() != 0.0)).all());
}

TEST(SmallWorld, WattsStrogatzKeepsEdgeCount) {
  EXPECT_EQ(gen_ws(40, 4, 0.3, 7).edge_count(), 80u);
}

TEST(SmallWorld, RejectsOddOrLargeK) {
  EXPECT_THROW(gen_ws(10, 3, 0.1, 1), ParameterError);
  EXPECT_THROW(gen_nw(10, 3, 0.1, 1), ParameterError);
  EXPECT_THROW(gen_ws(4, 4, 0.1, 1), ParameterError);
}

TEST(Generators, WellFormedAndDeterministic) {
  for (std::uint64_t seed : {1u, 2u, 3u, 99u}) {
    const Network nets[] = {gen_er(30, 0.2, false, seed), gen_er(30, 0.2, true, seed), gen_ba(30, 2, seed),
                            gen_nw(30, 4, 0.2, seed), gen_ws(30, 4, 0.2, seed)};
    for (const auto& g : nets) expect_well_formed(g);
    EXPECT_EQ(gen_er(30, 0.2, true, seed), nets[1]);
    EXPECT_EQ(gen_ba(30, 2, seed), nets[2]);
    EXPECT_EQ(gen_ws(30, 4, 0.2, seed), nets[4]);
  }
}

TEST(EdgeList, ZeroBased) {
  const auto g = load_edge_list("0 1\n1 2");
  EXPECT_EQ(g.size(), 3);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_FALSE(g.directed);
  EXPECT_TRUE(g.has_edge(1, 0));
}

TEST(EdgeList, OneBasedIsNormalized) {
  const auto g = load_edge_list("1 2\n2 3\n");
  EXPECT_EQ(g.size(), 3);
  EXPECT_TRUE(g.has_edge(0, 1));
  EXPECT_TRUE(g.has_edge(1, 2));
}

TEST(EdgeList, DirectedHeaderAndWeights) {
  const auto g = load_edge_list("directed\n# a comment\n0 1 2.5\n");
  EXPECT_TRUE(g.directed);
  EXPECT_DOUBLE_EQ(g.adj(1, 0), 2.5);
  EXPECT_EQ(g.adj(0, 1), 0.0);
}

TEST(EdgeList, Errors) {
  EXPECT_THROW(load_edge_list("0 0"), FormatError);
  EXPECT_THROW(load_edge_list("0 x"), FormatError);
  EXPECT_THROW(load_edge_list("0 1.5"), FormatError);
}

TEST(EdgeList, ZacharyFixture) {
  const auto g = load_edge_list_file(MANIE_FIXTURE_DIR "/zachary.edges");
  EXPECT_EQ(g.size(), 34);
  EXPECT_EQ(g.edge_count(), 78u);
  expect_well_formed(g);
}

TEST(EdgeList, ExampleFixture) {
  const auto g = load_edge_list_file(MANIE_FIXTURE_DIR "/example5.edges");
  EXPECT_EQ(g.size(), 5);
  EXPECT_TRUE(g.directed);
  EXPECT_EQ(g.edge_count(), 6u);
}
