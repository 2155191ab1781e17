#include "jomatch/cuts.hpp"
#include "jomatch/polytope.hpp"
#include "jomatch/relaxation.hpp"
#include "paper_points.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace jomatch;
using namespace jomatch::testing;

namespace {

// Direct transcription of the three consistency families, on any scalar type.
template <typename S>
S consistency_lhs(const SolutionMaps<S>& x, const ConsistencyCut& c) {
  const int i = c.triple.i, j = c.triple.j, k = c.triple.k, l = c.pivot;
  S v(0);
  switch (c.orientation) {
    case Orientation::kPivotInK:
      for (int t : c.d1)
        for (int q : c.d2) v -= x.at(i, j, t, q);
      for (int q : c.d2) v += x.at(j, k, q, l);
      for (int t : c.d1) v += x.at(i, k, t, l);
      break;
    case Orientation::kPivotInI:
      for (int t : c.d1) v += x.at(i, j, l, t);
      for (int t : c.d1)
        for (int q : c.d2) v -= x.at(j, k, t, q);
      for (int q : c.d2) v += x.at(i, k, l, q);
      break;
    case Orientation::kPivotInJ:
      for (int t : c.d1) v += x.at(i, j, t, l);
      for (int q : c.d2) v += x.at(j, k, l, q);
      for (int t : c.d1)
        for (int q : c.d2) v -= x.at(i, k, t, q);
      break;
  }
  return v;
}

// Random point with entries on a 1/64 grid and row/column sums at most one,
// so every subset sum is exact in double precision.
RealMaps random_point(const ObjectConfig& c, std::mt19937_64& g) {
  RealMaps s(c);
  for (int p = 0; p < c.num_pairs(); ++p) {
    auto& b = s.block_at(p);
    for (int t = 0; t < b.rows(); ++t)
      for (int q = 0; q < b.cols(); ++q) b(t, q) = static_cast<double>(g() % 65) / 64.0;
    for (int t = 0; t < b.rows(); ++t) {
      double r = b.row(t).sum();
      if (r > 1) b.row(t) = (b.row(t) * (64.0 / r)).array().floor() / 64.0;
    }
    for (int q = 0; q < b.cols(); ++q) {
      double r = b.col(q).sum();
      if (r > 1) b.col(q) = (b.col(q) * (64.0 / r)).array().floor() / 64.0;
    }
  }
  return s;
}

std::vector<std::vector<int>> nonempty_subsets(int d) {
  std::vector<std::vector<int>> out;
  for (int m = 1; m < (1 << d); ++m) {
    std::vector<int> s;
    for (int t = 0; t < d; ++t)
      if (m >> t & 1) s.push_back(t);
    out.push_back(s);
  }
  return out;
}

std::vector<std::pair<int64_t, int>> terms(const LinearForm& f) {
  std::vector<std::pair<int64_t, int>> v;
  for (size_t e = 0; e < f.var.size(); ++e) v.push_back({f.var[e], f.coef[e]});
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST(Cuts, ExampleValues) {
  ConsistencyCut a{{0, 1, 2}, Orientation::kPivotInI, 0, {0, 1}, {1}};
  EXPECT_EQ(evaluate(Cut{a}, two_subset_point()), frac(3, 2));
  EXPECT_EQ(consistency_lhs(two_subset_point(), a), frac(3, 2));
  EXPECT_TRUE(violated(Cut{a}, two_subset_point()));

  ConsistencyCut b{{0, 1, 2}, Orientation::kPivotInK, 1, {0, 1}, {0, 1}};
  EXPECT_EQ(evaluate(Cut{b}, third_point()), frac(4, 3));
  EXPECT_EQ(consistency_lhs(third_point(), b), frac(4, 3));

  BlockCut blk{{0, 1, 2}, Orientation::kPivotInK, {0}, {0, 1}, {0, 1}};
  EXPECT_TRUE(blk.facet_grade());
  EXPECT_EQ(evaluate(Cut{blk}, block_point()), frac(5, 2));
  EXPECT_EQ(rhs(Cut{blk}), 2);
  EXPECT_TRUE(violated(Cut{blk}, block_point()));

  ObjectConfig c = ObjectConfig::uniform(3, 2);
  SizeCut s3 = make_size_cut({0, 1, 2, 3}, 3, c);
  EXPECT_EQ(evaluate(Cut{s3}, size_point_a()), 0);
  EXPECT_TRUE(violated(Cut{s3}, size_point_a()));
  EXPECT_EQ(linear_form(Cut{s3}, c).var.size(), 4u);
  SizeCut s4 = make_size_cut({0, 2, 3, 4, 5}, 4, c);
  EXPECT_EQ(evaluate(Cut{s4}, size_point_b()), 0);
  EXPECT_EQ(linear_form(Cut{s4}, c).var.size(), 8u);
  EXPECT_THROW(make_size_cut({0, 1, 2}, 3, c), std::invalid_argument);
  EXPECT_THROW(make_size_cut({0, 1}, 1, c), std::invalid_argument);
}

TEST(Cuts, SingleElementCutsAreTriangleRows) {
  ObjectConfig c({2, 3, 2});
  for (Orientation o : {Orientation::kPivotInK, Orientation::kPivotInI, Orientation::kPivotInJ}) {
    Roles r = roles({0, 1, 2}, o);
    for (int l = 0; l < c.size(r.pivot); ++l)
      for (int a = 0; a < c.size(r.first); ++a)
        for (int b = 0; b < c.size(r.second); ++b) {
          ConsistencyCut cut{{0, 1, 2}, o, l, {a}, {b}};
          EXPECT_EQ(terms(linear_form(cut, c)), terms(triangle_form(c, triangle_of(cut))));
        }
  }
}

TEST(Cuts, LinearFormMatchesDirectFormula) {
  std::mt19937_64 g(8);
  ObjectConfig c({3, 2, 4});
  for (int rep = 0; rep < 50; ++rep) {
    RealMaps s = random_point(c, g);
    for (Orientation o : {Orientation::kPivotInK, Orientation::kPivotInI, Orientation::kPivotInJ}) {
      Roles r = roles({0, 1, 2}, o);
      for (const auto& d1 : nonempty_subsets(c.size(r.first)))
        for (const auto& d2 : nonempty_subsets(c.size(r.second))) {
          ConsistencyCut cut{{0, 1, 2}, o, static_cast<int>(g() % c.size(r.pivot)), d1, d2};
          EXPECT_EQ(evaluate(Cut{cut}, s), consistency_lhs(s, cut));
        }
    }
  }
}

TEST(Cuts, SeparationFindsExampleCuts) {
  RealMaps a = two_subset_point().cast<double>();
  SeparationResult r = separate_consistency(a, {0, 1, 2}, Orientation::kPivotInI, 0);
  EXPECT_EQ(r.value, 1.5);
  EXPECT_TRUE(r.violated);
  EXPECT_EQ(r.d1, (std::vector<int>{0, 1}));
  EXPECT_EQ(r.d2, (std::vector<int>{1}));
  EXPECT_EQ(maximize_by_enumeration(separation_data(a, {0, 1, 2}, Orientation::kPivotInI, 0)).value, 1.5);
  SeparationLpResult lp = separate_via_lp(a, {0, 1, 2}, Orientation::kPivotInI, 0);
  EXPECT_NEAR(lp.value, 1.5, 1e-9);

  RealMaps b = third_point().cast<double>();
  SeparationResult rb = separate_consistency(b, {0, 1, 2}, Orientation::kPivotInK, 1);
  EXPECT_NEAR(rb.value, 4.0 / 3.0, 1e-15);
  EXPECT_EQ(rb.d1, (std::vector<int>{0, 1}));
  EXPECT_EQ(rb.d2, (std::vector<int>{0, 1}));
  EXPECT_NEAR(separate_via_lp(b, {0, 1, 2}, Orientation::kPivotInK, 1).value, 4.0 / 3.0, 1e-9);
  auto all = separate_all(b);
  ConsistencyCut want{{0, 1, 2}, Orientation::kPivotInK, 1, {0, 1}, {0, 1}};
  EXPECT_NE(std::find(all.begin(), all.end(), want), all.end());
  // Cuts with a single-element side are not violated here.
  for (const auto& c : all) EXPECT_TRUE(c.d1.size() > 1 && c.d2.size() > 1);

  RealMaps zero(ObjectConfig::uniform(3, 2));
  EXPECT_EQ(separate_via_lp(zero, {0, 1, 2}, Orientation::kPivotInJ, 1).value, 0);
  EXPECT_FALSE(separate_consistency(zero, {0, 1, 2}, Orientation::kPivotInJ, 1).violated);
}

TEST(Cuts, MinCutEnumerationAndLpAgree) {
  std::mt19937_64 g(99);
  for (int rep = 0; rep < 300; ++rep) {
    ObjectConfig c({2 + static_cast<int>(g() % 6), 2 + static_cast<int>(g() % 3), 2 + static_cast<int>(g() % 6)});
    RealMaps s = random_point(c, g);
    Orientation o = static_cast<Orientation>(g() % 3);
    int l = static_cast<int>(g() % c.size(roles({0, 1, 2}, o).pivot));
    SeparationData data = separation_data(s, {0, 1, 2}, o, l);
    SeparationResult mc = maximize_by_mincut(data);
    SeparationResult en = maximize_by_enumeration(data);
    EXPECT_EQ(mc.value, en.value);
    EXPECT_EQ(mc.violated, en.violated);
    if (!mc.d1.empty() && !mc.d2.empty())
      EXPECT_EQ(mc.value, consistency_lhs(s, ConsistencyCut{{0, 1, 2}, o, l, mc.d1, mc.d2}));
    SeparationLpResult lp = maximize_by_lp(data);
    ASSERT_EQ(lp.status, LpStatus::kOptimal);
    EXPECT_NEAR(lp.value, mc.value, 1e-7);
    for (double y : lp.y) EXPECT_NEAR(y, std::round(y), 1e-7);
    for (double z : lp.z) EXPECT_NEAR(z, std::round(z), 1e-7);
  }
}

TEST(Cuts, NegativeEntriesAreRejected) {
  RealMaps s(ObjectConfig::uniform(3, 2));
  s.block(0, 1)(0, 0) = -0.5;
  EXPECT_THROW(separate_consistency(s, {0, 1, 2}, Orientation::kPivotInK, 0), PreconditionError);
}

TEST(Cuts, NoCutsOnVertices) {
  for (auto sizes : std::vector<std::vector<int>>{{2, 2, 2}, {1, 2, 3}, {2, 2, 2, 2}}) {
    VertexSet v = enumerate_vertices(ObjectConfig(sizes));
    for (const auto& p : v.points) {
      RealMaps s = RealMaps::from_flat(v.config, p);
      EXPECT_TRUE(separate_all(s).empty());
    }
  }
}

TEST(Cuts, TopKPicksTheLargestViolation) {
  // Two disjoint triples carrying the 4/3 and the 3/2 examples.
  ObjectConfig c = ObjectConfig::uniform(6, 2);
  RealMaps s(c);
  RealMaps a = third_point().cast<double>(), b = two_subset_point().cast<double>();
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      s.block(i, j) = a.block(i, j);
      s.block(i + 3, j + 3) = b.block(i, j);
    }
  // Oracle: largest violation over all cells by subset enumeration.
  double best = 0;
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      for (int k = j + 1; k < 6; ++k)
        for (int o = 0; o < 3; ++o)
          for (int l = 0; l < 2; ++l)
            best = std::max(best, maximize_by_enumeration(separation_data(s, {i, j, k}, Orientation(o), l)).value);
  EXPECT_EQ(best, 1.5);
  SeparateOptions top;
  top.limit = 1;
  top.strategy = SeparationStrategy::kTopK;
  auto t = separate_all(s, top);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(evaluate(Cut{t[0]}, s), 1.5);
  SeparateOptions first;
  first.limit = 1;
  auto f = separate_all(s, first);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].triple, (Triple{0, 1, 2}));
  EXPECT_NEAR(evaluate(Cut{f[0]}, s), 4.0 / 3.0, 1e-12);
  SeparateOptions threaded = top;
  threaded.limit = 1000;
  threaded.threads = 3;
  top.limit = 1000;
  EXPECT_EQ(separate_all(s, threaded), separate_all(s, top));
}

TEST(Cuts, ValidityOnVertices) {
  ObjectConfig c({2, 2, 3});
  VertexSet v = enumerate_vertices(c);
  std::vector<Cut> cuts;
  for (Orientation o : {Orientation::kPivotInK, Orientation::kPivotInI, Orientation::kPivotInJ}) {
    Roles r = roles({0, 1, 2}, o);
    for (const auto& d1 : nonempty_subsets(c.size(r.first)))
      for (const auto& d2 : nonempty_subsets(c.size(r.second)))
        for (const auto& d3 : nonempty_subsets(c.size(r.pivot))) cuts.push_back(BlockCut{{0, 1, 2}, o, d1, d2, d3});
  }
  for (const auto& p : v.points) {
    BinaryMaps x = BinaryMaps::from_flat(c, p);
    for (const Cut& cut : cuts) ASSERT_FALSE(violated(cut, x, 0.0));
  }
  // Size cuts hold on vertices that use at most m_hat universe labels.
  for (int m_hat = 3; m_hat <= 6; ++m_hat) {
    std::vector<int> pick(m_hat + 1);
    for (size_t a = 0; a < v.points.size(); ++a) {
      if (universe_size(v.labelings[a]) > m_hat) continue;
      BinaryMaps x = BinaryMaps::from_flat(c, v.points[a]);
      std::vector<bool> mask(c.total_elements(), false);
      std::fill(mask.begin(), mask.begin() + m_hat + 1, true);
      do {
        std::vector<int> e;
        for (int k = 0; k < c.total_elements(); ++k)
          if (mask[k]) e.push_back(k);
        ASSERT_TRUE(size_cut_valid_on(make_size_cut(e, m_hat, c), x));
      } while (std::prev_permutation(mask.begin(), mask.end()));
    }
  }
}

TEST(Cuts, ValidationErrors) {
  ObjectConfig c = ObjectConfig::uniform(3, 2);
  EXPECT_THROW(validate_cut(ConsistencyCut{{0, 1, 2}, Orientation::kPivotInK, 0, {}, {0}}, c), std::invalid_argument);
  EXPECT_THROW(validate_cut(ConsistencyCut{{0, 1, 2}, Orientation::kPivotInK, 2, {0}, {0}}, c), std::out_of_range);
  EXPECT_THROW(validate_cut(ConsistencyCut{{0, 1, 3}, Orientation::kPivotInK, 0, {0}, {0}}, c), std::out_of_range);
  EXPECT_THROW(validate_cut(BlockCut{{0, 1, 2}, Orientation::kPivotInK, {0}, {1, 0}, {0}}, c), std::invalid_argument);
  EXPECT_NO_THROW(validate_cut(BlockCut{{0, 1, 2}, Orientation::kPivotInJ, {1}, {0, 1}, {0, 1}}, c));
}

TEST(Cuts, CanonicalKeys) {
  ConsistencyCut c{{0, 1, 2}, Orientation::kPivotInK, 1, {0}, {0, 1}};
  EXPECT_EQ(canonical_key(Cut{c}), canonical_key(Cut{as_block_cut(c)}));
  ConsistencyCut d = c;
  d.pivot = 0;
  EXPECT_NE(canonical_key(Cut{c}), canonical_key(Cut{d}));
}

TEST(Cuts, JsonRoundTrip) {
  ObjectConfig c = ObjectConfig::uniform(3, 2);
  std::vector<Cut> cuts{ConsistencyCut{{0, 1, 2}, Orientation::kPivotInI, 0, {0, 1}, {1}},
                        BlockCut{{0, 1, 2}, Orientation::kPivotInK, {0}, {0, 1}, {0, 1}},
                        make_size_cut({0, 1, 2, 3}, 3, c)};
  std::string text = cuts_to_json_text(cuts);
  EXPECT_NE(text.find("\"pivot-in-i\""), std::string::npos);
  EXPECT_EQ(cuts_from_json_text(text), cuts);
  EXPECT_THROW(cuts_from_json_text("{"), MalformedInput);
  EXPECT_THROW(cuts_from_json_text("[{\"type\":\"other\"}]"), MalformedInput);
  EXPECT_THROW(cuts_from_json_text("{\"type\":\"size\"}"), MalformedInput);
}
