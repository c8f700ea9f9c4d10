#include "oracles.hpp"
#include "rudp/metrics.hpp"

#include <gtest/gtest.h>

using namespace rudp;

TEST(Accuracy, IdentityAndRenaming) {
  const std::vector<int> truth{0, 0, 1, 1, 2, 2, 2};
  EXPECT_EQ(hungarian_accuracy(truth, truth), 1.0);
  std::vector<int> renamed;
  for (int t : truth) renamed.push_back((t + 1) % 3 + 10);
  EXPECT_EQ(hungarian_accuracy(renamed, truth), 1.0);
}

TEST(Accuracy, MatchesBruteForce) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pred = oracle::random_labels(rng, 12, 4);
    const auto truth = oracle::random_labels(rng, 12, 4);
    EXPECT_EQ(hungarian_accuracy(pred, truth), oracle::brute_force_accuracy(pred, truth));
  }
  // unequal cluster counts on either side
  for (int trial = 0; trial < 50; ++trial) {
    const auto pred = oracle::random_labels(rng, 15, 2 + trial % 4);
    const auto truth = oracle::random_labels(rng, 15, 5 - trial % 3);
    EXPECT_EQ(hungarian_accuracy(pred, truth), oracle::brute_force_accuracy(pred, truth));
  }
}

TEST(Accuracy, NeverAbovePurity) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pred = oracle::random_labels(rng, 20, 1 + trial % 6);
    const auto truth = oracle::random_labels(rng, 20, 3);
    EXPECT_LE(hungarian_accuracy(pred, truth), purity(pred, truth));
  }
}

TEST(Nmi, Examples) {
  const std::vector<int> truth{0, 1, 1, 0, 2};
  EXPECT_NEAR(nmi(truth, truth), 1.0, 1e-15);
  EXPECT_EQ(nmi(std::vector<int>(5, 3), truth), 0.0);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pred = oracle::random_labels(rng, 10, 3);
    const auto t = oracle::random_labels(rng, 10, 3);
    EXPECT_NEAR(nmi(pred, t), oracle::nmi(pred, t), 1e-12);
  }
}

TEST(Purity, Examples) {
  const std::vector<int> truth{0, 1, 1, 0, 2};
  EXPECT_EQ(purity(truth, truth), 1.0);
  EXPECT_EQ(purity(std::vector<int>{0, 1, 2, 3, 4}, truth), 1.0);
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pred = oracle::random_labels(rng, 10, 4);
    const auto t = oracle::random_labels(rng, 10, 3);
    EXPECT_NEAR(purity(pred, t), oracle::purity(pred, t), 1e-12);
  }
}

TEST(Ari, Examples) {
  const std::vector<int> truth{0, 1, 1, 0, 2, 2, 2, 1};
  EXPECT_NEAR(ari(truth, truth), 1.0, 1e-15);
  EXPECT_EQ(ari(std::vector<int>(6, 0), std::vector<int>(6, 4)), 1.0);

  // n = 8 with contingency [[2,1],[1,4]]: sum C(n_ij,2) = 1+6 = 7, rows C(3,2)+C(5,2) = 13,
  // cols 13, expected 13*13/28, max 13.
  const std::vector<int> p{0, 0, 1, 0, 1, 1, 1, 1};
  const std::vector<int> t{0, 0, 0, 1, 1, 1, 1, 1};
  const double expected = 169.0 / 28.0;
  EXPECT_NEAR(ari(p, t), (7.0 - expected) / (13.0 - expected), 1e-12);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pred = oracle::random_labels(rng, 10, 3);
    const auto tt = oracle::random_labels(rng, 10, 4);
    EXPECT_NEAR(ari(pred, tt), oracle::ari(pred, tt), 1e-12);
  }
}

TEST(Metrics, InvariantUnderRenamingBothSides) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const auto pred = oracle::random_labels(rng, 14, 3);
    const auto truth = oracle::random_labels(rng, 14, 4);
    std::vector<int> p2, t2;
    for (int v : pred) p2.push_back(7 - 2 * v);
    for (int v : truth) t2.push_back((v + 2) % 4 + 100);
    EXPECT_EQ(hungarian_accuracy(pred, truth), hungarian_accuracy(p2, t2));
    EXPECT_NEAR(nmi(pred, truth), nmi(p2, t2), 1e-14);
    EXPECT_EQ(purity(pred, truth), purity(p2, t2));
    EXPECT_NEAR(ari(pred, truth), ari(p2, t2), 1e-14);
  }
}

TEST(Metrics, ConfusionAndErrors) {
  const std::vector<int> pred{1, 1, 0, 5};
  const std::vector<int> truth{0, 0, 1, 1};
  const EvalReport r = evaluate(pred, truth);
  EXPECT_EQ(r.confusion.counts.sum(), 4);
  EXPECT_EQ(r.confusion.truth_ids, (std::vector<int>{0, 1}));
  EXPECT_EQ(r.confusion.pred_ids, (std::vector<int>{0, 1, 5}));
  EXPECT_EQ(r.confusion.counts(0, 1), 2);
  EXPECT_DOUBLE_EQ(r.acc * 4.0, std::round(r.acc * 4.0));
  EXPECT_THROW(hungarian_accuracy(std::vector<int>{0}, truth), std::invalid_argument);
  EXPECT_THROW(nmi(std::vector<int>{}, std::vector<int>{}), std::invalid_argument);
}

TEST(Assignment, RectangularMaximum) {
  CountMatrix w(2, 3);
  w << 1, 9, 3, 8, 7, 1;
  const auto m = max_weight_assignment(w);
  EXPECT_EQ(m, (std::vector<int>{1, 0}));
  const auto mt = max_weight_assignment(CountMatrix(w.transpose()));
  EXPECT_EQ(mt, (std::vector<int>{1, 0, -1}));
}
