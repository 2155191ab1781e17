#include "jomatch/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

using namespace jomatch;

TEST(Synth, DeterministicForASeed) {
  CorruptionParams p{8, 4, 0.5, 0.7, 42};
  EXPECT_EQ(generate(p), generate(p));
  CorruptionParams q = p;
  q.seed = 43;
  EXPECT_FALSE(generate(p) == generate(q));
}

TEST(Synth, CleanInputIsIdentity) {
  Instance inst = generate({6, 3, 1.0, 1.0, 5});
  EXPECT_TRUE(inst.complete());
  for (const auto& b : inst.input) EXPECT_EQ(*b, BinaryBlock::Identity(3, 3));
  ASSERT_TRUE(inst.ground_truth.has_value());
  EXPECT_EQ(*inst.ground_truth, identity_labeling(inst.config));
}

TEST(Synth, SparseObservation) {
  Instance inst = generate({40, 2, 0.5, 0.05, 1});
  EXPECT_LT(inst.edges.size(), 780u / 5);
  EXPECT_EQ(generate({40, 2, 0.5, 0.05, 1}).edges, inst.edges);
}

TEST(Synth, BlocksArePermutations) {
  Instance inst = generate({12, 5, 0.0, 1.0, 3});
  EXPECT_TRUE(inst.permutation_shaped());
}

TEST(Synth, CorruptionFrequencies) {
  // A corrupted block is still the identity with probability 1/d!.
  const int n = 200, d = 3;
  const double p_true = 0.5, p_obs = 0.8;
  Instance inst = generate({n, d, p_true, p_obs, 9});
  int observed = 0, identity = 0;
  for (const auto& b : inst.input) {
    if (!b) continue;
    ++observed;
    identity += (*b == BinaryBlock::Identity(d, d));
  }
  const int pairs = n * (n - 1) / 2;
  const double q = p_true + (1 - p_true) / 6;
  EXPECT_NEAR(static_cast<double>(observed) / pairs, p_obs, 3 * std::sqrt(p_obs * (1 - p_obs) / pairs));
  EXPECT_NEAR(static_cast<double>(identity) / observed, q, 3 * std::sqrt(q * (1 - q) / observed));
}

TEST(Synth, PermutationsAreUniform) {
  std::mt19937_64 g = pair_engine(1, 0, 1);
  std::map<std::vector<int>, int> counts;
  for (int k = 0; k < 60000; ++k) ++counts[random_permutation(g, 3)];
  EXPECT_EQ(counts.size(), 6u);
  for (auto& [perm, c] : counts) EXPECT_NEAR(c, 10000, 400);
}

TEST(Synth, UniformBelowStaysInRange) {
  std::mt19937_64 g(3);
  for (int k = 0; k < 10000; ++k) EXPECT_LT(uniform_below(g, 7), 7u);
  for (int k = 0; k < 10000; ++k) {
    double u = uniform01(g);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Synth, PairStreamsAreIndependentOfOtherPairs) {
  // Changing n does not change the draws of an existing pair.
  Instance small = generate({5, 3, 0.5, 1.0, 77});
  Instance large = generate({9, 3, 0.5, 1.0, 77});
  EXPECT_EQ(*small.input[small.config.pair_index(1, 3)], *large.input[large.config.pair_index(1, 3)]);
}

TEST(Synth, RejectsBadParameters) {
  EXPECT_THROW(generate({1, 3, 0.5, 1.0, 0}), ConfigError);
  EXPECT_THROW(generate({4, 0, 0.5, 1.0, 0}), ConfigError);
  EXPECT_THROW(generate({4, 3, 1.5, 1.0, 0}), ConfigError);
  EXPECT_THROW(generate({4, 3, 0.5, -0.1, 0}), ConfigError);
  EXPECT_THROW(generate({4, 3, 0.5, 0.0, 0}), ConfigError);
}
