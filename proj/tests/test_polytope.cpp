#include "jomatch/polytope.hpp"
#include "jomatch/synth.hpp"
#include "paper_points.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace jomatch;
using namespace jomatch::testing;

namespace {

// All 0/1 vectors whose blocks are partial maps and which are cycle consistent.
std::vector<std::vector<int>> brute_force_vertices(const ObjectConfig& c) {
  std::vector<std::vector<int>> out;
  const int64_t nv = c.num_vars();
  for (int64_t mask = 0; mask < (int64_t{1} << nv); ++mask) {
    std::vector<int> x(nv);
    for (int64_t v = 0; v < nv; ++v) x[v] = mask >> v & 1;
    BinaryMaps s = BinaryMaps::from_flat(c, x);
    bool ok = true;
    for (int p = 0; p < c.num_pairs() && ok; ++p) ok = validate_partial_map(s.block_at(p)).ok;
    if (ok && check_cycle_consistency(s).ok) out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int pair_vars(const ObjectConfig& c) { return static_cast<int>(c.num_vars()); }

std::vector<BlockCut> all_block_cuts(const ObjectConfig& c) {
  std::vector<BlockCut> out;
  auto subsets = [](int d) {
    std::vector<std::vector<int>> s;
    for (int m = 1; m < (1 << d); ++m) {
      std::vector<int> v;
      for (int t = 0; t < d; ++t)
        if (m >> t & 1) v.push_back(t);
      s.push_back(v);
    }
    return s;
  };
  for (Orientation o : {Orientation::kPivotInK, Orientation::kPivotInI, Orientation::kPivotInJ}) {
    Roles r = roles({0, 1, 2}, o);
    for (const auto& d1 : subsets(c.size(r.first)))
      for (const auto& d2 : subsets(c.size(r.second)))
        for (const auto& d3 : subsets(c.size(r.pivot))) out.push_back({{0, 1, 2}, o, d1, d2, d3});
  }
  return out;
}

}  // namespace

TEST(Polytope, VertexCounts) {
  EXPECT_EQ(enumerate_vertices(ObjectConfig::uniform(2, 1)).size(), 2u);
  EXPECT_EQ(enumerate_vertices(ObjectConfig::uniform(3, 1)).size(), 5u);  // Bell number B3
  EXPECT_EQ(enumerate_vertices(ObjectConfig::uniform(4, 1)).size(), 15u);
  EXPECT_EQ(enumerate_vertices(ObjectConfig::uniform(2, 2)).size(), 7u);  // partial maps of [2] to [2]
  EXPECT_EQ(enumerate_vertices(ObjectConfig::uniform(3, 2)).size(), 87u);
}

TEST(Polytope, EnumerationMatchesBruteForce) {
  for (auto sizes : std::vector<std::vector<int>>{{2, 2, 2}, {1, 2, 3}, {1, 1, 2, 2}, {3, 3}, {2, 1, 2, 1}}) {
    ObjectConfig c(sizes);
    VertexSet v = enumerate_vertices(c);
    sort_points(v);
    EXPECT_EQ(v.points, brute_force_vertices(c));
  }
}

TEST(Polytope, EnumeratorsAgree) {
  for (auto sizes : std::vector<std::vector<int>>{
           {2, 2, 2}, {3, 3, 2}, {2, 2, 2, 2}, {1, 2, 3, 2}, {4, 4}, {3, 2, 3}, {1, 1, 1, 1, 2, 2}}) {
    ObjectConfig c(sizes);
    VertexSet a = enumerate_vertices(c), b = enumerate_vertices_by_filter(c);
    sort_points(a);
    sort_points(b);
    EXPECT_EQ(a.points, b.points);
    for (size_t x = 0; x < a.size(); ++x)
      EXPECT_EQ(labeling_from_maps(BinaryMaps::from_flat(c, a.points[x])), a.labelings[x]);
  }
}

TEST(Polytope, CanonicalLabeling) {
  ObjectConfig c({2, 2});
  BinaryMaps s(c);
  s.block(0, 1)(1, 0) = 1;
  UniverseLabeling lab = labeling_from_maps(s);
  EXPECT_EQ(lab.labels, (std::vector<std::vector<int>>{{0, 1}, {1, 0}}));
  EXPECT_EQ(maps_from_labeling(c, lab), s);
}

TEST(Polytope, Dimensions) {
  EXPECT_EQ(dimension(ObjectConfig::uniform(3, 2)), 12);
  EXPECT_EQ(dimension(ObjectConfig::uniform(3, 3)), 27);
  EXPECT_EQ(dimension(ObjectConfig::uniform(4, 2)), 24);
  EXPECT_EQ(dimension(ObjectConfig({1, 2, 3})), pair_vars(ObjectConfig({1, 2, 3})));
}

TEST(Polytope, AffineRank) {
  EXPECT_EQ(affine_rank({}), -1);
  EXPECT_EQ(affine_rank({{1, 2}}), 0);
  EXPECT_EQ(affine_rank({{0, 0}, {1, 1}, {2, 2}}), 1);
  EXPECT_EQ(affine_rank({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}), 3);
  EXPECT_EQ(affine_rank({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}), 2);
}

TEST(Polytope, FacetSuiteOnC32) {
  ObjectConfig c = ObjectConfig::uniform(3, 2);
  VertexSet v = enumerate_vertices(c);
  const int dim = dimension(v);
  ASSERT_EQ(dim, 12);
  for (const char* fam : {"nonneg", "rowsum", "consistency"}) {
    auto list = inequality_family(c, fam);
    EXPECT_FALSE(list.empty());
    for (const auto& ineq : list) {
      FacetCheck f = verify_facet(ineq.form, v, dim);
      EXPECT_TRUE(f.valid) << ineq.name;
      EXPECT_EQ(f.tight_rank, dim - 1) << ineq.name;
      EXPECT_TRUE(f.is_facet) << ineq.name;
    }
  }
  // 3 orientations x 2 pivots x 3 x 3 non-empty subset pairs.
  EXPECT_EQ(inequality_family(c, "consistency").size(), 54u);
  int redundant = 0;
  for (const BlockCut& b : all_block_cuts(c)) {
    FacetCheck f = verify_facet(linear_form(Cut{b}, c), v, dim);
    EXPECT_TRUE(f.valid);
    if (b.facet_grade()) {
      EXPECT_EQ(f.tight_rank, dim - 1) << canonical_key(Cut{b}) << " tight " << f.tight_count;
    } else {
      EXPECT_LT(f.tight_rank, dim - 1);
      ++redundant;
    }
  }
  EXPECT_GT(redundant, 0);
  BlockCut weak{{0, 1, 2}, Orientation::kPivotInK, {0}, {0}, {0, 1}};
  FacetCheck wf = verify_facet(linear_form(Cut{weak}, c), c);
  EXPECT_TRUE(wf.valid);
  EXPECT_FALSE(wf.is_facet);
}

TEST(Polytope, FamiliesValidOnLargerConfigs) {
  for (auto sizes : std::vector<std::vector<int>>{{2, 3, 2}, {2, 2, 2, 2}, {1, 3, 3}}) {
    ObjectConfig c(sizes);
    VertexSet v = enumerate_vertices(c);
    for (const char* fam : {"nonneg", "rowsum", "consistency", "block"})
      for (const auto& ineq : inequality_family(c, fam)) EXPECT_TRUE(verify_facet(ineq.form, v, -1).valid) << ineq.name;
  }
}

TEST(Polytope, SizeFamilyHoldsUnderItsBound) {
  ObjectConfig c = ObjectConfig::uniform(3, 2);
  VertexSet v = enumerate_vertices(c);
  auto sizes = inequality_family(c, "size");
  ASSERT_FALSE(sizes.empty());
  for (const auto& ineq : sizes) {
    EXPECT_GE(ineq.m_hat, 2);
    int checked = 0;
    for (size_t x = 0; x < v.size(); ++x) {
      if (universe_size(v.labelings[x]) > ineq.m_hat) continue;
      EXPECT_GE(form_value(ineq.form, v.points[x]), 1) << ineq.name;
      ++checked;
    }
    EXPECT_GT(checked, 0);
  }
}

TEST(Polytope, ViolatedInequalityReportsVertex) {
  ObjectConfig c = ObjectConfig::uniform(3, 2);
  LinearForm f{{c.var(0, 1, 0, 0), c.var(0, 1, 1, 1)}, {1, 1}, RowSense::kLe, 1};
  FacetCheck r = verify_facet(f, c);
  EXPECT_FALSE(r.valid);
  ASSERT_GE(r.violating_vertex, 0);
}

TEST(Polytope, HullMembership) {
  ObjectConfig c = ObjectConfig::uniform(3, 2);
  VertexSet v = enumerate_vertices(c);
  std::vector<double> vx(v.points[5].begin(), v.points[5].end());
  EXPECT_TRUE(hull_membership(vx, v).inside);
  std::vector<double> mid(vx.size());
  for (size_t e = 0; e < mid.size(); ++e) mid[e] = 0.5 * (v.points[5][e] + v.points[40][e]);
  HullResult m = hull_membership(mid, v);
  EXPECT_TRUE(m.inside);
  double total = 0;
  for (double w : m.weights) total += w;
  EXPECT_NEAR(total, 1, 1e-9);

  RationalMaps ex = outside_point();
  // Satisfies every implemented facet family exactly.
  std::vector<Rational> flat = ex.flatten();
  for (const char* fam : {"nonneg", "rowsum", "consistency"})
    for (const auto& ineq : inequality_family(c, fam)) {
      Rational lhs = evaluate(ineq.form, ex);
      if (ineq.form.sense == RowSense::kGe) EXPECT_GE(lhs, Rational(ineq.form.rhs)) << ineq.name;
      else EXPECT_LE(lhs, Rational(ineq.form.rhs)) << ineq.name;
    }
  for (const BlockCut& b : all_block_cuts(c))
    if (b.facet_grade()) EXPECT_FALSE(violated(Cut{b}, ex, 0.0));
  HullResult h = hull_membership(ex.cast<double>());
  EXPECT_FALSE(h.inside);
  EXPECT_GT(h.point_value, h.rhs + 1e-6);
  for (const auto& p : v.points) {
    double a = 0;
    for (size_t e = 0; e < p.size(); ++e) a += h.normal[e] * p[e];
    EXPECT_LE(a, h.rhs + 1e-9);
  }
  // The inequality from the worked example separates the point too.
  LinearForm g{{c.var(0, 1, 0, 0), c.var(0, 1, 0, 1), c.var(0, 1, 1, 1), c.var(1, 2, 0, 0), c.var(1, 2, 1, 0),
                c.var(1, 2, 1, 1), c.var(0, 2, 0, 0), c.var(0, 2, 0, 1), c.var(0, 2, 1, 1)},
               {-1, -1, -1, 1, 1, 1, 1, 1, 1},
               RowSense::kLe,
               2};
  EXPECT_EQ(evaluate(g, ex), frac(5, 2));
  EXPECT_TRUE(verify_facet(g, v, -1).valid);
}

TEST(Polytope, OracleMatchesVertexScan) {
  auto is_permutation = [](const BinaryMaps& s) {
    for (int p = 0; p < s.config().num_pairs(); ++p)
      if ((s.block_at(p).rowwise().sum().array() != 1).any()) return false;
    return true;
  };
  for (double p : {0.3, 0.6, 1.0})
    for (uint64_t seed = 0; seed < 5; ++seed) {
      Instance inst = generate({4, 2, p, 1.0, seed});
      ASSERT_EQ(default_formulation(inst), Formulation::kPermutation);
      int64_t best_partial = INT64_MAX, best_perm = INT64_MAX;
      for (const auto& x : enumerate_vertices_by_filter(inst.config).points) {
        BinaryMaps s = BinaryMaps::from_flat(inst.config, x);
        int64_t val = frobenius_objective(inst, s) - inst.matched_pairs();
        best_partial = std::min(best_partial, val);
        if (is_permutation(s)) best_perm = std::min(best_perm, val);
      }
      OracleResult partial = ilp_oracle(inst, Formulation::kPartial);
      OracleResult perm = ilp_oracle(inst);
      EXPECT_EQ(partial.optimum, best_partial);
      EXPECT_EQ(perm.optimum, best_perm);
      EXPECT_LE(partial.optimum, perm.optimum);
      ASSERT_FALSE(perm.argmin.empty());
      for (const auto& s : perm.argmin) {
        EXPECT_TRUE(is_permutation(s));
        EXPECT_EQ(static_cast<int64_t>(linear_objective(inst, s)), perm.optimum);
      }
      for (const auto& s : partial.argmin) EXPECT_EQ(static_cast<int64_t>(linear_objective(inst, s)), partial.optimum);
      if (p == 1.0) {
        EXPECT_TRUE(perm.unique());
        EXPECT_EQ(perm.argmin[0], maps_from_labeling(inst.config, *inst.ground_truth));
      }
    }
}

TEST(Polytope, SizeLimits) {
  EXPECT_THROW(enumerate_vertices(ObjectConfig::uniform(5, 3)), ConfigError);
  EXPECT_THROW(ilp_oracle(Instance(ObjectConfig::uniform(4, 3))), ConfigError);
}

TEST(Polytope, AffineRankMatchesFloatingRank) {
  std::mt19937_64 g(12);
  for (int rep = 0; rep < 300; ++rep) {
    const int dim = 1 + static_cast<int>(g() % 8), count = 1 + static_cast<int>(g() % 10);
    std::vector<std::vector<int>> pts(count, std::vector<int>(dim));
    for (auto& p : pts)
      for (int& x : p) x = static_cast<int>(g() % 3) - (g() % 4 == 0 ? 1 : 0);
    Eigen::MatrixXd diff(std::max(count - 1, 1), dim);
    diff.setZero();
    for (int a = 1; a < count; ++a)
      for (int c = 0; c < dim; ++c) diff(a - 1, c) = pts[a][c] - pts[0][c];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(diff);
    EXPECT_EQ(affine_rank(pts), static_cast<int>(lu.rank()));
  }
}
