#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "relief/metric.hpp"

using namespace relief;

TEST(Diff, Discrete) {
  const auto d = fixtures::xor8();
  EXPECT_EQ(diff_discrete(d, 0, 0, 1), 0.0);
  EXPECT_EQ(diff_discrete(d, 2, 0, 1), 1.0);
}

TEST(Diff, Continuous) {
  const auto d = fixtures::from_values({{2.0}, {4.5}, {7.0}}, {"a", "b", "a"}, FeatureKind::continuous);
  EXPECT_DOUBLE_EQ(diff_continuous(d, 0, 0, 1), 0.5);
  EXPECT_DOUBLE_EQ(diff_continuous(d, 0, 0, 2), 1.0);
  EXPECT_EQ(diff_continuous(d, 0, 1, 1), 0.0);
  EXPECT_THROW(diff_discrete(d, 0, 0, 1), DataError);
}

TEST(Diff, ConstantContinuousIsZero) {
  const auto d = fixtures::from_values({{3.0}, {3.0}}, {"a", "b"}, FeatureKind::continuous);
  EXPECT_EQ(diff_continuous(d, 0, 0, 1), 0.0);
}

TEST(Diff, MissingOneSide) {
  // Instance 3 (class A) is missing; class A observes 1, 1, 0.
  std::vector<std::vector<Cell>> rows{{1.0}, {1.0}, {0.0}, {Cell{}}, {1.0}, {0.0}};
  const auto d = build_dataset(rows, fixtures::descriptors(1), {"A", "A", "A", "A", "B", "B"});
  EXPECT_NEAR(diff_with_missing(d, 0, 3, 4), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(diff_with_missing(d, 0, 4, 3), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(diff_with_missing(d, 0, 3, 5), 2.0 / 3.0, 1e-15);
  EXPECT_THROW(diff_with_missing(d, 0, 0, 1), std::invalid_argument);
}

TEST(Diff, MissingBothSides) {
  std::vector<std::vector<Cell>> rows{{1.0}, {1.0}, {0.0}, {Cell{}}, {1.0}, {0.0}, {0.0}, {Cell{}}};
  const auto d = build_dataset(rows, fixtures::descriptors(1), {"A", "A", "A", "A", "B", "B", "B", "B"});
  // P(.|A) = {0: 1/3, 1: 2/3}, P(.|B) = {0: 2/3, 1: 1/3}.
  EXPECT_NEAR(diff_with_missing(d, 0, 3, 7), 1.0 - (1.0 / 3 * 2.0 / 3 + 2.0 / 3 * 1.0 / 3), 1e-15);
  EXPECT_NEAR(diff_with_missing(d, 0, 3, 3), 1.0 - (1.0 / 9 + 4.0 / 9), 1e-15);
}

TEST(Diff, MissingBothDegenerate) {
  std::vector<std::vector<Cell>> rows{{2.0}, {2.0}, {Cell{}}, {2.0}, {Cell{}}};
  const auto d = build_dataset(rows, fixtures::descriptors(1), {"A", "A", "A", "B", "B"});
  EXPECT_EQ(diff_with_missing(d, 0, 2, 4), 0.0);
}

TEST(Diff, MissingFallsBackToUnconditional) {
  // Class B has no observed value at all.
  std::vector<std::vector<Cell>> rows{{1.0}, {0.0}, {0.0}, {Cell{}}, {Cell{}}};
  const auto d = build_dataset(rows, fixtures::descriptors(1), {"A", "A", "A", "B", "B"});
  EXPECT_NEAR(diff_with_missing(d, 0, 3, 0), 1.0 - 1.0 / 3.0, 1e-15);
}

TEST(Distance, Xor8) {
  const auto d = fixtures::xor8();
  EXPECT_EQ(instance_distance(d, 0, 4), 1.0);
  EXPECT_EQ(instance_distance(d, 0, 1), 1.0);
  EXPECT_EQ(instance_distance(d, 0, 5), 2.0);
  const auto D = pairwise_distances(d);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) EXPECT_EQ(D.at(i, j), oracle::distance(d, i, j)) << i << "," << j;
}

TEST(Distance, IdenticalInstancesAndBounds) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto d = fixtures::random_mixed(seed, 25, 6, 3, 0.05);
    const auto D = pairwise_distances(d);
    for (std::size_t i = 0; i < d.instances(); ++i) {
      EXPECT_EQ(D.at(i, i), 0.0);
      for (std::size_t j = 0; j < d.instances(); ++j) {
        EXPECT_EQ(D.at(i, j), D.at(j, i));
        EXPECT_GE(D.at(i, j), 0.0);
        EXPECT_LE(D.at(i, j), static_cast<double>(d.features()) + 1e-12);
        if (i != j) EXPECT_NEAR(D.at(i, j), oracle::distance(d, i, j), 1e-12);
      }
    }
  }
}

TEST(Distance, IntegerValuedForAllDiscrete) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto d = fixtures::random_mixed(seed, 20, 5, 2, 0.0, 0.0);
    const auto D = pairwise_distances(d);
    for (std::size_t i = 0; i < d.instances(); ++i)
      for (std::size_t j = 0; j < d.instances(); ++j) EXPECT_EQ(D.at(i, j), std::round(D.at(i, j)));
  }
}

TEST(Distance, Statistics) {
  const auto d = fixtures::random_mixed(11, 30, 7, 2, 0.05);
  const auto D = pairwise_distances(d);
  const auto g = oracle::global_stats(d);
  EXPECT_NEAR(D.global_mean(), g.mean, 1e-12);
  EXPECT_NEAR(D.global_std(), g.sd, 1e-12);
  for (std::size_t i = 0; i < d.instances(); ++i) {
    const auto s = oracle::target_stats(d, i);
    EXPECT_NEAR(D.target_mean()[i], s.mean, 1e-12);
    EXPECT_NEAR(D.target_std()[i], s.sd, 1e-12);
  }
}

TEST(Distance, ThreadCountIsBitIdentical) {
  const auto d = fixtures::random_mixed(5, 90, 9, 3, 0.05);
  const auto one = pairwise_distances(d, {.threads = 1});
  for (std::size_t t : {2u, 3u, 8u}) {
    const auto many = pairwise_distances(d, {.threads = t});
    EXPECT_EQ(one.global_mean(), many.global_mean());
    EXPECT_EQ(one.global_std(), many.global_std());
    EXPECT_EQ(one.target_mean(), many.target_mean());
    EXPECT_EQ(one.target_std(), many.target_std());
    for (std::size_t i = 0; i < d.instances(); ++i)
      for (std::size_t j = 0; j < d.instances(); ++j) ASSERT_EQ(one.at(i, j), many.at(i, j));
  }
}

TEST(Distance, StreamingMatchesDense) {
  const auto d = fixtures::random_mixed(8, 40, 6, 2, 0.05);
  const auto dense = pairwise_distances(d);
  const auto stream = pairwise_distances(d, {.threads = 2, .dense_limit = 10});
  ASSERT_TRUE(dense.dense());
  ASSERT_FALSE(stream.dense());
  EXPECT_EQ(dense.global_mean(), stream.global_mean());
  EXPECT_EQ(dense.global_std(), stream.global_std());
  EXPECT_EQ(dense.target_mean(), stream.target_mean());
  std::vector<double> scratch;
  for (std::size_t i = 0; i < d.instances(); ++i) {
    const auto r = stream.row(i, scratch);
    for (std::size_t j = 0; j < d.instances(); ++j) ASSERT_EQ(r[j], dense.at(i, j));
  }
}

TEST(Distance, FeatureWeights) {
  const auto d = fixtures::xor8();
  const std::vector<double> phi{2.0, 0.0, 1.0};
  const auto D = pairwise_distances(d, {}, phi);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) {
      const double expect = (2.0 * oracle::diff(d, 0, i, j) + oracle::diff(d, 2, i, j)) / 3.0;
      EXPECT_DOUBLE_EQ(D.at(i, j), expect);
    }
  const std::vector<double> zero(3, 0.0);
  const auto Z = pairwise_distances(d, {}, zero);
  EXPECT_EQ(Z.at(0, 5), 2.0);
  const std::vector<double> bad{1.0, -1.0, 0.0};
  EXPECT_THROW(pairwise_distances(d, {}, bad), std::invalid_argument);
}
