#include "jomatch/instance.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace jomatch;

namespace {

BinaryBlock mat(std::initializer_list<std::initializer_list<int>> rows) {
  BinaryBlock b(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  int t = 0;
  for (auto r : rows) {
    int q = 0;
    for (int v : r) b(t, q++) = v;
    ++t;
  }
  return b;
}

// Random consistent maps from a random labeling.
BinaryMaps random_consistent(const ObjectConfig& c, std::mt19937_64& g) {
  UniverseLabeling lab;
  const int universe = static_cast<int>(c.total_elements());
  for (int i = 0; i < c.n(); ++i) {
    std::vector<int> pool(universe);
    for (int u = 0; u < universe; ++u) pool[u] = u + 1;
    std::shuffle(pool.begin(), pool.end(), g);
    std::vector<int> labels;
    for (int t = 0; t < c.size(i); ++t) labels.push_back(g() % 3 == 0 ? 0 : pool[t]);
    lab.labels.push_back(labels);
  }
  return maps_from_labeling(c, lab);
}

}  // namespace

TEST(ObjectConfig, PairIndexMatchesEnumerationOrder) {
  for (int n = 2; n <= 9; ++n) {
    ObjectConfig c = ObjectConfig::uniform(n, 2);
    int p = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        EXPECT_EQ(c.pair_index(i, j), p);
        EXPECT_EQ(c.pair_at(p), std::make_pair(i, j));
        ++p;
      }
    EXPECT_EQ(c.num_pairs(), p);
  }
}

TEST(ObjectConfig, VariableLayoutIsDense) {
  ObjectConfig c({1, 2, 2});
  EXPECT_EQ(c.num_vars(), 8);
  std::vector<int> hit(8, 0);
  for (int p = 0; p < c.num_pairs(); ++p) {
    auto [i, j] = c.pair_at(p);
    for (int t = 0; t < c.size(i); ++t)
      for (int q = 0; q < c.size(j); ++q) ++hit[c.var(i, j, t, q)];
  }
  for (int h : hit) EXPECT_EQ(h, 1);
  EXPECT_EQ(c.element_at(0), std::make_pair(0, 0));
  EXPECT_EQ(c.element_at(3), std::make_pair(2, 0));
  EXPECT_EQ(c.element(2, 1), 4);
}

TEST(ObjectConfig, RejectsBadSizes) {
  EXPECT_THROW(ObjectConfig({3}), ConfigError);
  EXPECT_THROW(ObjectConfig({2, 0}), ConfigError);
}

TEST(Instance, SetInputTransposesReversedPairs) {
  Instance inst(ObjectConfig({1, 2}));
  inst.set_input(1, 0, mat({{0}, {1}}));
  ASSERT_TRUE(inst.observed(0, 1));
  EXPECT_EQ(*inst.input[0], mat({{0, 1}}));
  EXPECT_EQ(inst.edges.size(), 1u);
  EXPECT_EQ(inst.matched_pairs(), 1);
}

TEST(Instance, RejectsNonPartialMaps) {
  Instance inst(ObjectConfig::uniform(2, 2));
  EXPECT_THROW(inst.set_input(0, 1, mat({{1, 1}, {0, 0}})), MalformedInput);
  EXPECT_THROW(inst.set_input(0, 1, mat({{2, 0}, {0, 1}})), MalformedInput);
  EXPECT_THROW(inst.set_input(0, 1, mat({{1, 0, 0}})), MalformedInput);
  EXPECT_THROW(inst.set_input(0, 0, mat({{1, 0}, {0, 1}})), MalformedInput);
}

TEST(PartialMap, ReportsFirstOffendingLine) {
  auto r = validate_partial_map(mat({{1, 0, 0}, {0, 1, 0}, {0, 1, 0}}));
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.row, -1);
  EXPECT_EQ(r.col, 1);
}

TEST(Consistency, IntroductoryExample) {
  // One element in object 1, two in objects 2 and 3.
  ObjectConfig c({1, 2, 2});
  BinaryMaps good(c);
  good.block(0, 1) = mat({{0, 1}});
  good.block(0, 2) = mat({{0, 0}});
  good.block(1, 2) = mat({{1, 0}, {0, 0}});
  EXPECT_TRUE(check_cycle_consistency(good).ok);

  BinaryMaps bad(c);
  bad.block(0, 1) = mat({{1, 0}});
  bad.block(0, 2) = mat({{0, 1}});
  bad.block(1, 2) = mat({{0, 0}, {0, 1}});
  auto check = check_cycle_consistency(bad);
  EXPECT_FALSE(check.ok);
  EXPECT_EQ(check.witness.i, 0);
  EXPECT_EQ(check.witness.j, 1);
  EXPECT_EQ(check.witness.k, 2);

  bad.block(1, 2) = mat({{0, 1}, {0, 0}});
  EXPECT_TRUE(check_cycle_consistency(bad).ok);
}

TEST(Consistency, LabelingsAreConsistent) {
  std::mt19937_64 g(7);
  for (int rep = 0; rep < 200; ++rep) {
    ObjectConfig c({1 + static_cast<int>(g() % 3), 1 + static_cast<int>(g() % 3), 1 + static_cast<int>(g() % 3), 2});
    EXPECT_TRUE(check_cycle_consistency(random_consistent(c, g)).ok);
  }
}

TEST(CostTensor, SignsAndTranspose) {
  Instance inst(ObjectConfig({2, 3}));
  inst.set_input(0, 1, mat({{0, 1, 0}, {0, 0, 1}}));
  CostTensor a(inst);
  EXPECT_EQ(a(0, 1, 0, 1), -1);
  EXPECT_EQ(a(0, 1, 0, 0), 1);
  EXPECT_EQ(a(1, 0, 1, 0), -1);
  EXPECT_EQ(a(1, 0, 2, 1), -1);
  Instance empty(ObjectConfig({2, 3}));
  EXPECT_EQ(CostTensor(empty)(0, 1, 0, 0), 0);
}

TEST(Objective, LinearPlusMatchesEqualsFrobenius) {
  std::mt19937_64 g(11);
  for (int rep = 0; rep < 500; ++rep) {
    ObjectConfig c({2, 3, 2, 1});
    Instance inst(c);
    for (int p = 0; p < c.num_pairs(); ++p) {
      if (g() % 4 == 0) continue;
      auto [i, j] = c.pair_at(p);
      inst.set_input(i, j, maps_from_labeling(c, [&] {
                              UniverseLabeling l;
                              for (int o = 0; o < c.n(); ++o) {
                                std::vector<int> v{0, 1, 2, 3};
                                std::shuffle(v.begin(), v.end(), g);
                                v.resize(c.size(o));
                                l.labels.push_back(v);
                              }
                              return l;
                            }()).block(i, j));
    }
    BinaryMaps x = random_consistent(c, g);
    EXPECT_EQ(inst.matched_pairs() + linear_objective(inst, x), frobenius_objective(inst, x));
  }
}

TEST(Labeling, IdentityGivesIdentityBlocks) {
  ObjectConfig c = ObjectConfig::uniform(4, 3);
  BinaryMaps s = maps_from_labeling(c, identity_labeling(c));
  for (int p = 0; p < c.num_pairs(); ++p) EXPECT_EQ(s.block_at(p), BinaryBlock::Identity(3, 3));
}

TEST(SolutionMaps, FlattenRoundTripAndTransposedAccess) {
  ObjectConfig c({2, 3, 1});
  RealMaps s(c);
  s.block(0, 1)(1, 2) = 0.5;
  s.block(1, 2)(2, 0) = 0.25;
  auto flat = s.flatten();
  EXPECT_EQ(flat[c.var(0, 1, 1, 2)], 0.5);
  EXPECT_EQ(RealMaps::from_flat(c, flat), s);
  EXPECT_EQ(s.at(1, 0, 2, 1), 0.5);
  EXPECT_EQ(s.at(2, 1, 0, 2), 0.25);
}

TEST(Json, RoundTrip) {
  Instance inst(ObjectConfig({2, 2, 3}));
  inst.set_input(0, 1, mat({{0, 1}, {1, 0}}));
  inst.set_input(1, 2, mat({{0, 0, 1}, {0, 0, 0}}));
  inst.ground_truth = UniverseLabeling{{{1, 2}, {2, 1}, {0, 3, 1}}};
  Instance back = instance_from_json_text(instance_to_json_text(inst));
  EXPECT_EQ(back, inst);
}

TEST(Json, DiagnosticsNameTheField) {
  auto message = [](const std::string& text) {
    try {
      instance_from_json_text(text);
    } catch (const MalformedInput& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message("{\"sizes\":[1,1],\"blocks\":{}}").find("'n'"), std::string::npos);
  EXPECT_NE(message("{\"n\":2,\"sizes\":[1],\"blocks\":{}}").find("sizes"), std::string::npos);
  EXPECT_NE(message("{\"n\":2,\"sizes\":[1,1],\"blocks\":{\"1-2\":[[1]]}}").find("1-2"), std::string::npos);
  EXPECT_NE(message("{\"n\":2,\"sizes\":[2,2],\"blocks\":{\"1,2\":[[1,1],[0,0]]}}").find("row 1"), std::string::npos);
  EXPECT_NE(message("{\"n\":2,\"sizes\":[1,1],\"blocks\":{\"1,2\":[[3]]}}").find("non-binary"), std::string::npos);
  EXPECT_NE(message("not json").find("invalid JSON"), std::string::npos);
  EXPECT_NE(message("{\"n\":2,\"sizes\":[1,1],\"blocks\":{\"1,2\":[[1]]},\"edges\":[]}").find("edges"),
            std::string::npos);
}
