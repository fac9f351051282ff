#include <gtest/gtest.h>

#include <numeric>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "relief/scorers.hpp"
#include "relief/simbench.hpp"

using namespace relief;

namespace {

AlgoConfig cfg(Algorithm a, std::size_t k = 10) {
  AlgoConfig c;
  c.algorithm = a;
  c.k = k;
  c.k_max = 5;
  return c;
}

Dataset with_labels(const Dataset& d, std::vector<std::string> labels) {
  return build_dataset(d.cells(), d.descriptors(), labels);
}

}  // namespace

TEST(Property, ScoresBoundedForEveryAlgorithm) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    relief::Rng rng(seed);
    const auto d = fixtures::random_mixed(seed, 5 + rng.below(30), 1 + rng.below(8), 2 + rng.below(3), 0.1);
    for (auto a : kAllAlgorithms) {
      for (double s : score(d, cfg(a)).scores) {
        EXPECT_GE(s, -1.0 - 1e-12) << algorithm_name(a) << " seed " << seed;
        EXPECT_LE(s, 1.0 + 1e-12) << algorithm_name(a) << " seed " << seed;
      }
    }
  }
}

TEST(Property, ThreadCountDoesNotChangeBits) {
  const auto d = fixtures::random_mixed(77, 100, 7, 3, 0.05);
  for (auto a : kAllAlgorithms) {
    const auto one = score(d, cfg(a), {.threads = 1}).scores;
    for (std::size_t t : {2u, 5u, 8u}) EXPECT_EQ(one, score(d, cfg(a), {.threads = t}).scores) << algorithm_name(a);
  }
}

TEST(Property, FeaturePermutationEquivariance) {
  const auto d = fixtures::random_mixed(21, 30, 6, 2, 0.05);
  std::vector<std::size_t> perm{3, 0, 5, 1, 4, 2};
  const auto p = d.select_features(perm);
  for (auto a : kAllAlgorithms) {
    const auto base = score(d, cfg(a)).scores;
    const auto moved = score(p, cfg(a)).scores;
    for (std::size_t k = 0; k < perm.size(); ++k) EXPECT_NEAR(moved[k], base[perm[k]], 1e-12) << algorithm_name(a);
  }
}

TEST(Property, LabelPermutationGivesNoSignal) {
  // Label-permuted data carries no signal, so the mean score over
  // permutations is close to zero for every feature.
  SimulationSpec s{.model = SimModel::main_effect, .n = 200, .a = 20, .relevant_count = 2, .flip_prob = 0.1, .seed = 5};
  const auto sim = generate(s);
  for (auto a : {Algorithm::relieff, Algorithm::multisurf, Algorithm::surf}) {
    std::vector<double> mean(20, 0.0);
    for (std::uint64_t r = 0; r < 20; ++r) {
      auto labels = sim.data.label_tokens();
      relief::Rng rng(1000 + r);
      rng.shuffle(labels);
      const auto w = score(with_labels(sim.data, labels), cfg(a));
      for (std::size_t f = 0; f < 20; ++f) mean[f] += w.scores[f] / 20.0;
    }
    for (std::size_t f = 0; f < 20; ++f) EXPECT_LT(std::abs(mean[f]), 0.05) << algorithm_name(a) << " feature " << f;
  }
}

TEST(Property, OracleAgreementOnMixedData) {
  for (std::uint64_t seed = 100; seed < 115; ++seed) {
    relief::Rng rng(seed);
    const auto d = fixtures::random_mixed(seed, 8 + rng.below(25), 1 + rng.below(6), 2 + rng.below(2), 0.05);
    for (auto a : kAllAlgorithms) {
      const auto got = score(d, cfg(a, 3)).scores;
      const auto want = oracle::scores(d, cfg(a, 3));
      for (std::size_t f = 0; f < got.size(); ++f) EXPECT_NEAR(got[f], want[f], 1e-10) << algorithm_name(a);
    }
  }
}

TEST(Property, DuplicateFeatureGetsEqualScore) {
  const auto base = fixtures::random_mixed(31, 40, 4, 2, 0.0);
  std::vector<std::size_t> keep{0, 1, 2, 3, 1};
  const auto d = base.select_features(keep);
  for (auto a : kAllAlgorithms) {
    const auto w = score(d, cfg(a)).scores;
    EXPECT_EQ(w[1], w[4]) << algorithm_name(a);
  }
}
