#include <gtest/gtest.h>

#include <cmath>

#include "manie/error.hpp"
#include "manie/eval.hpp"
#include "manie/random.hpp"

using namespace manie;

namespace {

// Every positive/negative pair, ties counted as one half.
double concordance(const Eigen::MatrixXd& scores, const Network& truth) {
  double hits = 0.0;
  double pairs = 0.0;
  const Eigen::Index n = truth.size();
  const auto candidate = [&](Eigen::Index i, Eigen::Index j) { return i != j && (truth.directed || i < j); };
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      if (!candidate(a, b) || truth.adj(a, b) == 0.0) continue;
      for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index d = 0; d < n; ++d) {
          if (!candidate(c, d) || truth.adj(c, d) != 0.0) continue;
          const double p = std::abs(scores(a, b)), q = std::abs(scores(c, d));
          hits += p > q ? 1.0 : (p == q ? 0.5 : 0.0);
          pairs += 1.0;
        }
      }
    }
  }
  return hits / pairs;
}

Network random_truth(int n, bool directed, Rng& rng) {
  std::bernoulli_distribution coin(0.4);
  Network g{Eigen::MatrixXd::Zero(n, n), directed};
  for (int i = 0; i < n; ++i) {
    for (int j = directed ? 0 : i + 1; j < n; ++j) {
      if (i == j || !coin(rng)) continue;
      g.adj(i, j) = 1.0;
      if (!directed) g.adj(j, i) = 1.0;
    }
  }
  return g;
}

// Coarse integer scores so that ties are common.
Eigen::MatrixXd random_scores(int n, Rng& rng) {
  std::uniform_int_distribution<int> level(-3, 3);
  Eigen::MatrixXd s(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) s(i, j) = level(rng);
  }
  return s;
}

bool has_both_classes(const Network& g) {
  const auto e = g.edge_count();
  const auto candidates = static_cast<std::size_t>(g.directed ? g.size() * (g.size() - 1) : g.size() * (g.size() - 1) / 2);
  return e > 0 && e < candidates;
}

}  // namespace

TEST(Auc, PerfectSeparation) {
  Network g{Eigen::MatrixXd::Zero(4, 4), true};
  g.adj(0, 1) = g.adj(2, 3) = 1.0;
  EXPECT_DOUBLE_EQ(auc(g.adj, g).auc, 1.0);
  EXPECT_DOUBLE_EQ(auc(g.adj, g).neg_log2_auc, 0.0);
}

TEST(Auc, CompleteTiesGiveOneHalf) {
  Network g{Eigen::MatrixXd::Zero(4, 4), true};
  g.adj(0, 1) = 1.0;
  EXPECT_DOUBLE_EQ(auc(Eigen::MatrixXd::Constant(4, 4, 0.3), g).auc, 0.5);
}

TEST(Auc, ThreeOfFourPairsConcordant) {
  const std::vector<double> s{0.9, 0.4, 0.6, 0.1};
  const bool pos[] = {true, true, false, false};
  EXPECT_DOUBLE_EQ(mann_whitney_auc(s, pos), 0.75);
}

TEST(Auc, UndefinedWithoutBothClasses) {
  const std::vector<double> s{0.1, 0.2};
  const bool all[] = {true, true};
  EXPECT_THROW(mann_whitney_auc(s, all), MetricError);
  Network empty{Eigen::MatrixXd::Zero(3, 3), false};
  EXPECT_THROW(auc(Eigen::MatrixXd::Ones(3, 3), empty), MetricError);
}

TEST(Auc, CountsAndOrientation) {
  Network und{Eigen::MatrixXd::Zero(4, 4), false};
  und.adj(0, 1) = und.adj(1, 0) = 1.0;
  const auto r = auc(Eigen::MatrixXd::Random(4, 4), und);
  EXPECT_EQ(r.n_pos, 1u);
  EXPECT_EQ(r.n_neg, 5u);
  Network dir{Eigen::MatrixXd::Zero(4, 4), true};
  dir.adj(1, 0) = 1.0;
  const auto d = auc(Eigen::MatrixXd::Random(4, 4), dir);
  EXPECT_EQ(d.n_pos, 1u);
  EXPECT_EQ(d.n_neg, 11u);
}

TEST(Auc, SignIsIgnored) {
  Network g{Eigen::MatrixXd::Zero(3, 3), true};
  g.adj(0, 1) = 1.0;
  Eigen::MatrixXd s = Eigen::MatrixXd::Constant(3, 3, 0.1);
  s(0, 1) = -5.0;
  EXPECT_DOUBLE_EQ(auc(s, g).auc, 1.0);
}

TEST(Auc, MissingNodesExcluded) {
  Network g{Eigen::MatrixXd::Zero(4, 4), true};
  g.adj(0, 1) = 1.0;
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(4, 4);
  s(0, 1) = 1.0;
  s(3, 2) = 9.0;  // a false positive, but node 3 is missing
  EXPECT_LT(auc(s, g).auc, 1.0);
  const auto r = auc(s, g, exclude_nodes({false, false, false, true}));
  EXPECT_DOUBLE_EQ(r.auc, 1.0);
  EXPECT_EQ(r.n_pos + r.n_neg, 6u);
}

TEST(Auc, RejectsBadInput) {
  Network g{Eigen::MatrixXd::Zero(3, 3), true};
  g.adj(0, 1) = 1.0;
  EXPECT_THROW(auc(Eigen::MatrixXd::Zero(2, 2), g), ParameterError);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(3, 3);
  s(1, 2) = std::nan("");
  EXPECT_THROW(auc(s, g), ParameterError);
}

TEST(NegLog2, Values) {
  EXPECT_EQ(neg_log2(1.0), 0.0);
  EXPECT_FALSE(std::signbit(neg_log2(1.0)));
  EXPECT_DOUBLE_EQ(neg_log2(0.5), 1.0);
  EXPECT_NEAR(neg_log2(0.8), 0.3219, 1e-4);
  EXPECT_THROW(neg_log2(0.0), MetricError);
  EXPECT_THROW(neg_log2(1.5), MetricError);
}

// Property: mid-rank AUC is the pairwise concordance, on every size up to 6.
TEST(AucProperties, MatchesBruteForceConcordance) {
  Rng rng(1);
  int checked = 0;
  for (int n = 2; n <= 6; ++n) {
    for (bool directed : {false, true}) {
      for (int rep = 0; rep < 200; ++rep) {
        const auto g = random_truth(n, directed, rng);
        if (!has_both_classes(g)) continue;
        const auto s = random_scores(n, rng);
        EXPECT_NEAR(auc(s, g).auc, concordance(s, g), 1e-12);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 1000);
}

TEST(AucProperties, InvariantUnderIncreasingTransforms) {
  Rng rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    const auto g = random_truth(6, rep % 2 == 0, rng);
    if (!has_both_classes(g)) continue;
    Eigen::MatrixXd s(6, 6);
    for (Eigen::Index k = 0; k < s.size(); ++k) s(k) = u(rng);
    const double base = auc(s, g).auc;
    EXPECT_DOUBLE_EQ(auc(s.array().cube().matrix(), g).auc, base);
    EXPECT_DOUBLE_EQ(auc((2.0 * s.array() + 5.0).matrix(), g).auc, base);
  }
}

TEST(AucProperties, ReversedRankingComplements) {
  Rng rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    const auto g = random_truth(6, true, rng);
    if (!has_both_classes(g)) continue;
    Eigen::MatrixXd s(6, 6);
    for (Eigen::Index k = 0; k < s.size(); ++k) s(k) = u(rng);
    const Eigen::MatrixXd reversed = (1.0 / s.array()).matrix();
    EXPECT_NEAR(auc(s, g).auc + auc(reversed, g).auc, 1.0, 1e-12);
  }
}

TEST(Auc, InvertedRankingHasInfiniteScore) {
  Network g{Eigen::MatrixXd::Zero(3, 3), true};
  g.adj(0, 1) = 1.0;
  Eigen::MatrixXd s = Eigen::MatrixXd::Ones(3, 3);
  s(0, 1) = 0.0;
  const auto r = auc(s, g);
  EXPECT_EQ(r.auc, 0.0);
  EXPECT_TRUE(std::isinf(r.neg_log2_auc));
}
