#include "jomatch/polytope.hpp"
#include "jomatch/relaxation.hpp"
#include "jomatch/synth.hpp"
#include "paper_points.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace jomatch;
using namespace jomatch::testing;

namespace {

// Row activity check of an integer point against every row of a model.
bool feasible(const LpModel& m, const std::vector<double>& x) {
  for (int j = 0; j < m.num_cols(); ++j)
    if (x[j] < m.lower(j) - 1e-12 || x[j] > m.upper(j) + 1e-12) return false;
  for (int r = 0; r < m.num_rows(); ++r) {
    double a = m.row_activity(r, x);
    if (m.sense(r) != RowSense::kGe && a > m.rhs(r) + 1e-12) return false;
    if (m.sense(r) != RowSense::kLe && a < m.rhs(r) - 1e-12) return false;
  }
  return true;
}

// Fixes every column to the given point and reports whether the model stays feasible.
bool point_feasible_by_lp(LpModel m, const std::vector<double>& x) {
  for (int j = 0; j < m.num_cols(); ++j) m.set_bounds(j, x[j], x[j]);
  return solve(m).status == LpStatus::kOptimal;
}

std::vector<double> to_double(const RationalMaps& s) {
  std::vector<double> v;
  for (const Rational& r : s.flatten()) v.push_back(static_cast<double>(r));
  return v;
}

}  // namespace

TEST(Relaxation, PermSyncCounts) {
  Instance inst = generate({3, 2, 1.0, 1.0, 1});
  LpModel m = build_perm_sync_lp(inst);
  EXPECT_EQ(m.num_cols(), 12);
  int eq = 0, le = 0;
  for (int r = 0; r < m.num_rows(); ++r) (m.sense(r) == RowSense::kEq ? eq : le)++;
  EXPECT_EQ(eq, 12);
  EXPECT_EQ(le, 24);
  EXPECT_EQ(triangle_row_count(inst.config), 24);
}

TEST(Relaxation, UnequalSizes) {
  ObjectConfig c({1, 2, 2});
  Instance inst(c);
  LpModel m = build_jom_basic_lp(inst);
  EXPECT_EQ(m.num_cols(), 8);
  EXPECT_THROW(build_perm_sync_lp(inst), ConfigError);
  int64_t expect = 0;
  for (int p = 0; p < c.num_pairs(); ++p) expect += c.size(c.pair_at(p).first) * c.size(c.pair_at(p).second);
  EXPECT_EQ(m.num_cols(), expect);
}

TEST(Relaxation, VarIndexBijection) {
  ObjectConfig c({2, 3, 1, 4});
  std::set<std::tuple<int, int, int, int>> seen;
  for (int64_t v = 0; v < c.num_vars(); ++v) {
    VarIndex x = var_index(c, v);
    EXPECT_LT(x.i, x.j);
    EXPECT_EQ(c.var(x.i, x.j, x.t, x.q), v);
    seen.insert({x.i, x.j, x.t, x.q});
  }
  EXPECT_EQ(static_cast<int64_t>(seen.size()), c.num_vars());
}

TEST(Relaxation, TriangleRowIdIsInjective) {
  ObjectConfig c({2, 3, 2, 3});
  std::set<int64_t> ids;
  int64_t rows = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      for (int k = j + 1; k < 4; ++k)
        for (int l = 0; l < c.size(i); ++l)
          for (int t = 0; t < c.size(j); ++t)
            for (int q = 0; q < c.size(k); ++q)
              for (int kind = 0; kind < 3; ++kind) {
                ids.insert(triangle_row_id(c, {i, j, k, l, t, q, kind}));
                ++rows;
              }
  EXPECT_EQ(static_cast<int64_t>(ids.size()), rows);
  EXPECT_EQ(rows, triangle_row_count(c));
}

TEST(Relaxation, IdentityIsOptimalWithoutCorruption) {
  for (int n : {3, 5, 6}) {
    for (int d : {2, 3}) {
      Instance inst = generate({n, d, 1.0, 1.0, 7});
      LpSolution s = solve(build_perm_sync_lp(inst));
      ASSERT_TRUE(s.optimal());
      EXPECT_NEAR(s.objective, -double(n * (n - 1) / 2 * d), 1e-9);
      LpSolution b = solve(build_jom_basic_lp(inst));
      EXPECT_NEAR(b.objective, -double(n * (n - 1) / 2 * d), 1e-9);
    }
  }
}

TEST(Relaxation, ZeroIsFeasibleForBasic) {
  Instance inst = generate({4, 3, 0.5, 1.0, 2});
  LpModel m = build_jom_basic_lp(inst);
  EXPECT_TRUE(feasible(m, std::vector<double>(m.num_cols(), 0.0)));
}

TEST(Relaxation, TriangleExampleIsCutOff) {
  RationalMaps s = triangle_point();
  ObjectConfig c = s.config();
  LinearForm f = triangle_form(c, {0, 1, 2, 0, 0, 0, 1});
  EXPECT_EQ(evaluate(f, s), frac(5, 4));
  LpModel m = build_jom_basic_lp(Instance(c));
  EXPECT_FALSE(feasible(m, to_double(s)));
  // Without triangle rows the same point is feasible.
  RelaxationOptions o;
  o.force_lazy = true;
  o.auto_formulation = false;
  Relaxation lazy = build_relaxation(Instance(c), o);
  EXPECT_TRUE(feasible(lazy.model, to_double(s)));
  EXPECT_GT(lazy.add_violated_triangles(to_double(s)), 0);
  EXPECT_FALSE(feasible(lazy.model, to_double(s)));
}

TEST(Relaxation, AttachedCutRemovesExamplePoint) {
  RationalMaps s = two_subset_point();
  ObjectConfig c = s.config();
  LpModel base = build_jom_basic_lp(Instance(c));
  std::vector<double> x = to_double(s);
  ASSERT_TRUE(feasible(base, x));
  ASSERT_TRUE(point_feasible_by_lp(base, x));
  ConsistencyCut cut{{0, 1, 2}, Orientation::kPivotInI, 0, {0, 1}, {1}};
  LpModel cutm = attach_cuts(base, c, {cut});
  EXPECT_EQ(cutm.num_rows(), base.num_rows() + 1);
  EXPECT_FALSE(point_feasible_by_lp(cutm, x));
}

TEST(Relaxation, AttachIsIdempotent) {
  Instance inst(ObjectConfig::uniform(3, 2));
  RelaxationOptions o;
  o.auto_formulation = false;
  Relaxation r = build_relaxation(inst, o);
  const int rows = r.model.num_rows();
  ConsistencyCut cut{{0, 1, 2}, Orientation::kPivotInK, 1, {0, 1}, {0, 1}};
  EXPECT_EQ(attach_cuts(r, {cut}), 1);
  EXPECT_EQ(attach_cuts(r, {cut}), 0);
  EXPECT_EQ(r.model.num_rows(), rows + 1);
  // A single-element cut coincides with a triangle row already present.
  ConsistencyCut tri{{0, 1, 2}, Orientation::kPivotInJ, 0, {1}, {0}};
  EXPECT_EQ(attach_cuts(r, {tri}), 0);
  EXPECT_EQ(attach_cuts(r, {}), 0);
  LpModel m = build_jom_basic_lp(inst);
  EXPECT_TRUE(attach_cuts(m, inst.config, {}) == m);
}

TEST(Relaxation, EveryVertexIsFeasible) {
  for (auto sizes : std::vector<std::vector<int>>{{2, 2, 2}, {1, 2, 3}, {2, 2, 2, 2}, {3, 3, 2}}) {
    ObjectConfig c(sizes);
    Instance inst(c);
    LpModel basic = build_jom_basic_lp(inst);
    VertexSet v = enumerate_vertices(c);
    for (const auto& p : v.points) {
      std::vector<double> x(p.begin(), p.end());
      EXPECT_TRUE(feasible(basic, x));
    }
  }
  // Permutation vertices satisfy the equality form.
  ObjectConfig c = ObjectConfig::uniform(3, 3);
  LpModel perm = build_perm_sync_lp(generate({3, 3, 0.5, 1.0, 4}));
  int perms = 0;
  for (const auto& lab : enumerate_vertices(c).labelings) {
    bool full = true;
    for (int i = 0; i < 3; ++i)
      for (int t = 0; t < 3; ++t)
        for (int j = 0; j < 3 && full; ++j)
          if (j != i) {
            int hits = 0;
            for (int q = 0; q < 3; ++q) hits += lab.labels[i][t] != 0 && lab.labels[i][t] == lab.labels[j][q];
            full = hits == 1;
          }
    if (!full) continue;
    ++perms;
    std::vector<int> flat = maps_from_labeling(c, lab).flatten();
    EXPECT_TRUE(feasible(perm, std::vector<double>(flat.begin(), flat.end())));
  }
  EXPECT_EQ(perms, 36);
}

TEST(Relaxation, EqualityFormIsARestriction) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Instance inst = generate({5, 3, 0.4, 1.0, seed});
    LpSolution p = solve(build_perm_sync_lp(inst));
    LpSolution b = solve(build_jom_basic_lp(inst));
    ASSERT_TRUE(p.optimal() && b.optimal());
    EXPECT_GE(p.objective, b.objective - 1e-7);
  }
}

TEST(Relaxation, LazyMatchesFull) {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    Instance inst = generate({6, 3, 0.5, 1.0, seed});
    double full = solve(build_relaxation(inst).model).objective;
    RelaxationOptions o;
    o.force_lazy = true;
    Relaxation r = build_relaxation(inst, o);
    LpSolution s;
    for (int round = 0; round < 200; ++round) {
      s = solve(r.model);
      ASSERT_TRUE(s.optimal());
      if (r.add_violated_triangles(s.x) == 0) break;
    }
    EXPECT_NEAR(s.objective, full, 1e-7);
    EXPECT_LT(r.triangle_rows(), triangle_row_count(inst.config));
  }
}

TEST(Relaxation, DefaultFormulation) {
  EXPECT_EQ(default_formulation(generate({4, 3, 0.3, 1.0, 0})), Formulation::kPermutation);
  Instance partial(ObjectConfig({2, 3, 3}));
  EXPECT_EQ(default_formulation(partial), Formulation::kPartial);
}
