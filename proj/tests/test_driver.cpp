#include "jomatch/driver.hpp"
#include "jomatch/polytope.hpp"
#include "jomatch/synth.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace jomatch;

namespace {

double best_permutation_weight(const BlockMatrix& w) {
  const int d = static_cast<int>(w.rows());
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  double best = -1;
  do {
    double s = 0;
    for (int t = 0; t < d; ++t) s += w(t, perm[t]);
    best = std::max(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST(Driver, CleanInstancesAreRecoveredByEveryMethod) {
  for (auto [n, d] : std::vector<std::pair<int, int>>{{3, 2}, {5, 3}, {8, 2}}) {
    Instance inst = generate({n, d, 1.0, 1.0, 3});
    for (const char* m : {"basic", "double", "lpf"}) {
      SolveOptions o;
      o.uniqueness_probe = true;
      SolveReport r = solve_method(m, inst, o);
      EXPECT_EQ(r.status, SolveStatus::kOptimal) << m;
      EXPECT_TRUE(r.is_binary) << m;
      EXPECT_TRUE(r.is_consistent) << m;
      EXPECT_TRUE(r.recovered) << m;
      EXPECT_EQ(r.cuts_added, 0) << m;
      EXPECT_EQ(r.rounds, 1) << m;
      EXPECT_NEAR(r.objective, -double(n * (n - 1) / 2 * d), 1e-9);
      ASSERT_TRUE(r.unique.has_value());
      EXPECT_TRUE(*r.unique);
      EXPECT_EQ(r.method, m);
    }
  }
  EXPECT_THROW(solve_method("sdp", generate({3, 2, 1.0, 1.0, 0})), ConfigError);
}

TEST(Driver, RelaxationChainAndOracle) {
  int binary_seen = 0;
  for (double p : {0.3, 0.6, 1.0})
    for (uint64_t seed = 0; seed < 8; ++seed) {
      Instance inst = generate({4, 2, p, 1.0, seed});
      SolveReport b = solve_basic(inst), dl = double_lp(inst), lpf = cutting_plane_lpf(inst);
      OracleResult o = ilp_oracle(inst);
      EXPECT_LE(b.objective, dl.objective + 1e-6);
      EXPECT_LE(dl.objective, lpf.objective + 1e-6);
      EXPECT_LE(lpf.objective, o.optimum + 1e-6);
      for (const SolveReport* r : {&b, &dl, &lpf}) {
        if (r->is_binary && r->is_consistent) {
          EXPECT_NEAR(r->objective, double(o.optimum), 1e-6);
          ++binary_seen;
        }
        if (r->recovered) EXPECT_TRUE(r->is_binary);
      }
    }
  EXPECT_GT(binary_seen, 0);
}

TEST(Driver, DoubleLpStopsOnBinaryBasic) {
  Instance inst = generate({6, 3, 0.9, 1.0, 11});
  SolveReport b = solve_basic(inst);
  ASSERT_TRUE(b.is_binary);
  SolveReport d = double_lp(inst);
  EXPECT_EQ(d.cuts_added, 0);
  EXPECT_EQ(d.rounds, 1);
  EXPECT_EQ(d.objective, b.objective);
  EXPECT_EQ(d.lp.x, b.lp.x);
}

TEST(Driver, CuttingPlaneFixedPoint) {
  for (uint64_t seed = 0; seed < 6; ++seed) {
    Instance inst = generate({5, 3, 0.3, 0.7, seed});
    SolveReport r = cutting_plane_lpf(inst);
    ASSERT_EQ(r.status, SolveStatus::kOptimal);
    EXPECT_TRUE(separate_all(r.maps).empty());
    for (size_t k = 1; k < r.round_objectives.size(); ++k)
      EXPECT_GE(r.round_objectives[k], r.round_objectives[k - 1] - 1e-9);
    EXPECT_EQ(r.rounds, static_cast<int>(r.round_objectives.size()));
  }
}

TEST(Driver, CutLoopTightensCraftedCosts) {
  // Costs that reward the third column pattern of a fractional point on C_{3,2}
  // and charge for X(1,2); the consistency cuts must lift the basic optimum.
  ObjectConfig c = ObjectConfig::uniform(3, 2);
  RelaxationOptions ro;
  ro.auto_formulation = false;
  Relaxation relax = build_relaxation(Instance(c), ro);
  std::vector<double> cost(c.num_vars(), 0.0);
  for (int t = 0; t < 2; ++t) {
    cost[c.var(1, 2, t, 1)] = -1;
    cost[c.var(0, 2, t, 1)] = -1;
    for (int q = 0; q < 2; ++q) cost[c.var(0, 1, t, q)] = 1;
  }
  for (int v = 0; v < c.num_vars(); ++v) relax.model.set_cost(v, cost[v]);
  LpSolution first = solve(relax.model);
  ASSERT_TRUE(first.optimal());
  LpSolution s = first;
  int cuts = 0;
  for (int round = 0; round < 20; ++round) {
    auto found = separate_all(RealMaps::from_flat(c, s.x));
    if (found.empty()) break;
    cuts += attach_cuts(relax, std::vector<Cut>(found.begin(), found.end()));
    s = solve(relax.model);
    ASSERT_TRUE(s.optimal());
  }
  EXPECT_GE(cuts, 1);
  EXPECT_GT(s.objective, first.objective + 1e-6);
  double best = 0;
  for (const auto& p : enumerate_vertices(c).points) {
    double v = 0;
    for (size_t e = 0; e < p.size(); ++e) v += cost[e] * p[e];
    best = std::min(best, v);
  }
  EXPECT_LE(s.objective, best + 1e-9);
  // Half of every rewarded entry satisfies all triangle rows at cost -2; the
  // integer optimum is -1.
  EXPECT_NEAR(first.objective, -2, 1e-9);
  EXPECT_EQ(best, -1);
  EXPECT_NEAR(s.objective, best, 1e-9);
}

TEST(Driver, Rounding) {
  ObjectConfig c = ObjectConfig::uniform(2, 2);
  RealMaps s(c);
  s.block(0, 1) << 0.6, 0.4, 0.4, 0.6;
  RoundingResult r = round_solution(s);
  EXPECT_EQ(r.maps.block(0, 1), (BinaryBlock::Identity(2, 2)));
  EXPECT_TRUE(r.consistent);
  EXPECT_FALSE(is_binary(s));

  Instance inst = generate({4, 3, 0.5, 1.0, 2});
  BinaryMaps truth = maps_from_labeling(inst.config, *inst.ground_truth);
  EXPECT_EQ(round_solution(truth.cast<double>()).maps, truth);
  EXPECT_TRUE(is_binary(truth.cast<double>()));

  std::mt19937_64 g(19);
  for (int rep = 0; rep < 500; ++rep) {
    const int d = 2 + static_cast<int>(g() % 4);
    ObjectConfig cc = ObjectConfig::uniform(2, d);
    RealMaps x(cc);
    auto& b = x.block(0, 1);
    for (int t = 0; t < d; ++t)
      for (int q = 0; q < d; ++q) b(t, q) = 0.01 + static_cast<double>(g() % 1000) / 1000.0;
    BinaryMaps out = round_solution(x).maps;
    double got = 0;
    for (int t = 0; t < d; ++t)
      for (int q = 0; q < d; ++q) got += out.block(0, 1)(t, q) * b(t, q);
    EXPECT_NEAR(got, best_permutation_weight(b), 1e-12);
  }
}

TEST(Driver, InconsistentRoundingIsReported) {
  ObjectConfig c = ObjectConfig::uniform(3, 1);
  RealMaps s(c);
  s.block(0, 1)(0, 0) = 0.9;
  s.block(1, 2)(0, 0) = 0.9;
  RoundingResult r = round_solution(s);
  EXPECT_FALSE(r.consistent);
}

TEST(Driver, ReportsAreDeterministic) {
  Instance inst = generate({6, 3, 0.4, 0.8, 5});
  SolveReport a = double_lp(inst), b = double_lp(inst);
  EXPECT_EQ(a.lp.x, b.lp.x);
  EXPECT_EQ(a.cuts_added, b.cuts_added);
  SolveOptions threaded;
  threaded.threads = 3;
  SolveReport t = double_lp(inst, threaded);
  EXPECT_EQ(a.lp.x, t.lp.x);
}

TEST(Driver, BackendsGiveTheSameObjective) {
  if (!highs_available()) GTEST_SKIP();
  for (uint64_t seed = 0; seed < 4; ++seed) {
    Instance inst = generate({5, 3, 0.4, 1.0, seed});
    SolveOptions a, b;
    a.lp.backend = LpBackend::kBuiltin;
    b.lp.backend = LpBackend::kHighs;
    EXPECT_NEAR(solve_basic(inst, a).objective, solve_basic(inst, b).objective, 1e-7);
  }
}

TEST(Driver, LazyTrianglesGiveTheFullOptimum) {
  Instance inst = generate({7, 3, 0.4, 1.0, 1});
  SolveOptions full, lazy;
  lazy.relaxation.force_lazy = true;
  SolveReport a = solve_basic(inst, full), b = solve_basic(inst, lazy);
  EXPECT_NEAR(a.objective, b.objective, 1e-7);
  EXPECT_GT(b.lazy_rounds, 0);
  EXPECT_LT(b.lp_rows, a.lp_rows);
}

TEST(Driver, CsvFormat) {
  EXPECT_EQ(results_csv_header(), "n,d,p_true,p_obs,seed,method,objective,is_binary,recovered,cuts_added,rounds,wall_ms");
  ResultRow r{20, 3, 0.9, 1.0, 7, "basic", -570, true, true, 0, 1, 12.34};
  EXPECT_EQ(results_csv_line(r), "20,3,0.9000,1.0000,7,basic,-570,1,1,0,1,12.3");
  EXPECT_EQ(results_csv_line(r, false), "20,3,0.9000,1.0000,7,basic,-570,1,1,0,1,");
}
