#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "relief/dataset.hpp"

using namespace relief;

TEST(Dataset, Xor8Shape) {
  const auto d = fixtures::xor8();
  EXPECT_EQ(d.instances(), 8u);
  EXPECT_EQ(d.features(), 3u);
  EXPECT_EQ(d.classes(), 2u);
  EXPECT_EQ(d.class_names(), (std::vector<std::string>{"0", "1"}));
  EXPECT_EQ(d.class_count(0), 4u);
  EXPECT_EQ(d.class_count(1), 4u);
  for (std::size_t f = 0; f < 3; ++f) EXPECT_EQ(d.feature(f).value_domain, (std::vector<double>{0, 1}));
  EXPECT_FALSE(d.has_missing());
}

TEST(Dataset, SingleClassRejected) {
  EXPECT_THROW(fixtures::from_values({{0}, {1}}, {"x", "x"}), DataError);
}

TEST(Dataset, EntirelyMissingColumnRejected) {
  std::vector<std::vector<Cell>> rows{{1.0, Cell{}}, {0.0, Cell{}}};
  try {
    build_dataset(rows, fixtures::descriptors(2), {"a", "b"});
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("A2"), std::string::npos);
  }
}

TEST(Dataset, DimensionMismatchAndNaN) {
  EXPECT_THROW(build_dataset({{1.0}, {0.0, 1.0}}, fixtures::descriptors(1), {"a", "b"}), DataError);
  EXPECT_THROW(build_dataset({{1.0}, {0.0}}, fixtures::descriptors(1), {"a"}), DataError);
  EXPECT_THROW(build_dataset({{1.0}}, fixtures::descriptors(1), {"a"}), DataError);
  EXPECT_THROW(build_dataset({{std::nan("")}, {0.0}}, fixtures::descriptors(1), {"a", "b"}), DataError);
}

TEST(Dataset, ClassPriors) {
  std::vector<std::string> labels;
  for (int i = 0; i < 2; ++i) labels.push_back("A");
  for (int i = 0; i < 3; ++i) labels.push_back("B");
  for (int i = 0; i < 5; ++i) labels.push_back("C");
  std::vector<std::vector<double>> v(10, std::vector<double>{0});
  const auto p = class_priors(fixtures::from_values(v, labels));
  EXPECT_EQ(p.classes, (std::vector<std::string>{"A", "B", "C"}));
  EXPECT_DOUBLE_EQ(p.of(0), 0.2);
  EXPECT_DOUBLE_EQ(p.of(1), 0.3);
  EXPECT_DOUBLE_EQ(p.of(2), 0.5);
}

TEST(Dataset, PriorsSumToOne) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d = fixtures::random_mixed(seed, 30, 3, 2 + seed % 4, 0.1);
    double s = 0;
    for (double p : class_priors(d).probability) {
      EXPECT_GT(p, 0.0);
      s += p;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Dataset, ObservedRange) {
  std::vector<std::vector<Cell>> rows{{2.5}, {Cell{}}, {-1.0}, {7.0}};
  auto desc = fixtures::descriptors(1, FeatureKind::continuous);
  const auto d = build_dataset(rows, desc, {"a", "b", "a", "b"});
  const auto r = observed_range(d, 0);
  EXPECT_EQ(r.min, -1.0);
  EXPECT_EQ(r.max, 7.0);
  EXPECT_FALSE(r.constant);

  const auto c = build_dataset({{3.0}, {3.0}}, desc, {"a", "b"});
  EXPECT_TRUE(observed_range(c, 0).constant);

  EXPECT_THROW(observed_range(fixtures::xor8(), 0), DataError);
}

TEST(Dataset, StatisticsRecomputedFromData) {
  auto desc = fixtures::descriptors(1, FeatureKind::continuous);
  desc[0].observed_min = -100;
  desc[0].observed_max = 100;
  const auto d = build_dataset({{1.0}, {4.0}}, desc, {"a", "b"});
  EXPECT_EQ(d.feature(0).observed_min, 1.0);
  EXPECT_EQ(d.feature(0).observed_max, 4.0);
}

TEST(Dataset, CellsRoundTrip) {
  const auto d = fixtures::random_mixed(3, 20, 5, 3, 0.2);
  const auto again = build_dataset(d.cells(), d.descriptors(), d.label_tokens());
  EXPECT_TRUE(again == d);
}

TEST(Dataset, SelectFeatures) {
  const auto d = fixtures::xor8();
  const std::vector<std::size_t> keep{2, 0};
  const auto s = d.select_features(keep);
  ASSERT_EQ(s.features(), 2u);
  EXPECT_EQ(s.feature(0).name, "A3");
  EXPECT_EQ(s.feature(1).name, "A1");
  for (std::size_t i = 0; i < d.instances(); ++i) {
    EXPECT_EQ(s.value(i, 0), d.value(i, 2));
    EXPECT_EQ(s.value(i, 1), d.value(i, 0));
    EXPECT_EQ(s.label(i), d.label(i));
  }
}

TEST(Weights, MakeWeights) {
  const auto w = make_weights(fixtures::xor8(), {0.1, 0.2, 0.3}, "x");
  EXPECT_EQ(w.names, (std::vector<std::string>{"A1", "A2", "A3"}));
  EXPECT_EQ(w.tier, (std::vector<int>{0, 0, 0}));
  EXPECT_TRUE(w.scored(1));
}
