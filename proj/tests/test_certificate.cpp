#include "jomatch/certificate.hpp"
#include "jomatch/driver.hpp"
#include "jomatch/synth.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace jomatch;

namespace {

// Second evaluation of kappa, delta and the five conditions, written directly
// from the definitions with a(k,i) = a(i,k)^T.
struct Oracle {
  const Instance& inst;
  double alpha, beta;
  int n, d;

  Oracle(const Instance& in, double a = 1.172, double b = 1.657)
      : inst(in), alpha(a), beta(b), n(in.config.n()), d(in.config.size(0)) {}

  double a(int k, int i, int l, int t) const {
    const auto& x = k < i ? *inst.input[inst.config.pair_index(k, i)] : *inst.input[inst.config.pair_index(i, k)];
    int v = k < i ? x(l, t) : x(t, l);
    return 1.0 - 2.0 * v;
  }

  double kappa(int i, int j, int t) const {
    double s1 = 0;
    for (int l = 0; l < d; ++l) {
      if (l == t) continue;
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        s1 += std::min(a(k, i, l, t) / alpha + a(k, j, t, t) / (beta * d), a(k, j, l, t) / alpha + a(k, i, t, t) / (beta * d));
      }
    }
    double s2 = 0;
    for (int k = 0; k < n; ++k) {
      if (k != i) s2 += a(k, i, t, t);
      if (k != j) s2 += a(k, j, t, t);
    }
    double s3 = 0;
    for (int l = 0; l < d; ++l)
      if (l != t) s3 += (a(i, j, t, l) + a(j, i, t, l)) / alpha + 2 * a(i, j, t, t) / (beta * d);
    return s1 / n + (1 / (2 * alpha) - (d - 1) / (2 * beta * d)) * s2 / n - (d - 2) / alpha + 1 + s3 / (2 * n);
  }

  double summand(int i, int j, int t, int q, int k) const {
    if (a(k, i, t, t) != -1) return 0;
    return (a(k, j, t, q) - a(i, j, t, q)) / alpha + (a(i, j, t, t) - a(k, j, t, t)) / (beta * d);
  }

  double delta(int i, int j, int t, int q) const {
    double s = 0;
    for (int k = 0; k < n; ++k)
      if (k != i && k != j) s += summand(i, j, t, q, k);
    return s / n;
  }

  // counts[case][verdict] over i<j and ordered t != q.
  std::array<std::array<int64_t, 3>, 6> counts() const {
    std::array<std::array<int64_t, 3>, 6> c{};
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int t = 0; t < d; ++t)
          for (int q = 0; q < d; ++q) {
            if (t == q) continue;
            const double d1 = delta(i, j, t, q), d2 = delta(j, i, q, t);
            const double att = a(i, j, t, t), aqq = a(i, j, q, q), atq = a(i, j, t, q);
            int kind;
            double m;
            if (att == 1 && aqq == 1 && atq == 1) kind = 0, m = std::min(d1, d2);
            else if (att == 1 && aqq == 1) kind = 1, m = std::min(d1, d2) - 1;
            else if (att == -1 && aqq == -1) kind = 2, m = std::min(kappa(i, j, t), kappa(i, j, q)) + 0.5 * (d1 + d2);
            else if (att == 1) kind = 3, m = kappa(i, j, q) + d1 + d2;
            else kind = 4, m = kappa(i, j, t) + d1 + d2;
            int verdict = m > 1e-12 ? 0 : m >= -1e-12 ? 1 : 2;
            ++c[kind][verdict];
          }
    return c;
  }
};

// Relabels objects by `perm` (object a becomes perm[a]).
Instance relabel(const Instance& in, const std::vector<int>& perm) {
  Instance out(in.config);
  for (auto [i, j] : in.edges) {
    BinaryBlock b = *in.input[in.config.pair_index(i, j)];
    int a = perm[i], c = perm[j];
    if (a < c) out.set_input(a, c, b);
    else out.set_input(c, a, b.transpose());
  }
  return out;
}

}  // namespace

TEST(Certificate, KappaAndDeltaMatchOracle) {
  for (auto [n, d, p] : std::vector<std::tuple<int, int, double>>{{5, 2, 0.5}, {6, 3, 0.4}, {7, 4, 0.8}}) {
    for (uint64_t seed = 0; seed < 3; ++seed) {
      Instance inst = generate({n, d, p, 1.0, seed});
      Oracle o(inst);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          for (int t = 0; t < d; ++t) {
            if (i < j) EXPECT_NEAR(kappa(inst, i, j, t), o.kappa(i, j, t), 1e-12);
            for (int q = 0; q < d; ++q) EXPECT_NEAR(delta(inst, i, j, t, q), o.delta(i, j, t, q), 1e-12);
          }
        }
    }
  }
}

TEST(Certificate, ConditionCountsMatchOracle) {
  for (auto [n, d, p] : std::vector<std::tuple<int, int, double>>{{6, 2, 0.7}, {8, 3, 0.8}, {10, 3, 0.95}}) {
    for (uint64_t seed = 0; seed < 3; ++seed) {
      Instance inst = generate({n, d, p, 1.0, seed});
      ConditionsReport r = check_conditions(inst);
      EXPECT_EQ(r.counts, Oracle(inst).counts());
      EXPECT_EQ(r.cells, int64_t(n) * (n - 1) / 2 * d * (d - 1));
      int64_t non_strict = 0;
      for (const auto& row : r.counts) non_strict += row[1] + row[2];
      EXPECT_EQ(r.all_strict, non_strict == 0);
      EXPECT_EQ(r.counts[5][0] + r.counts[5][1] + r.counts[5][2], 0);
      EXPECT_EQ(r.worst.size(), std::min<size_t>(100, static_cast<size_t>(non_strict)));
    }
  }
}

TEST(Certificate, CleanInputValues) {
  const double al = 1.172, be = 1.657;
  for (auto [n, d] : std::vector<std::pair<int, int>>{{5, 2}, {12, 3}, {50, 2}}) {
    Instance inst = generate({n, d, 1.0, 1.0, 0});
    // Identity input: a_tt = -1 and a_lt = +1 for l != t on every pair.
    const double closed = (n - 2.0) / n * (d - 1) * (1 / al - 1 / (be * d)) +
                          (1 / (2 * al) - (d - 1) / (2 * be * d)) * (-2.0 * (n - 1) / n) - (d - 2) / al + 1 +
                          (d - 1) / (2.0 * n) * (2 / al - 2 / (be * d));
    EXPECT_NEAR(kappa(inst, 0, 1, 0), closed, 1e-12);
    EXPECT_EQ(delta(inst, 0, 1, 0, 1), 0.0);
    ConditionsReport r = check_conditions(inst);
    // Every off-diagonal cell has a_tt = a_qq = -1 and a_tq = +1.
    EXPECT_EQ(r.counts[2][0], r.cells);
    EXPECT_TRUE(r.all_strict);
    EXPECT_NEAR(r.min_margin, closed, 1e-12);
  }
}

TEST(Certificate, CleanInputCertificate) {
  for (auto [n, d] : std::vector<std::pair<int, int>>{{4, 2}, {9, 3}}) {
    Instance inst = generate({n, d, 1.0, 1.0, 0});
    DualCertificate c = build_dual_certificate(inst);
    EXPECT_TRUE(c.verified) << c.first_violation;
    for (const auto& [id, v] : c.lambda) EXPECT_EQ(v, 0.0) << id;
    for (double r : c.r) EXPECT_NEAR(r, 0.5, 1e-15);
    const double expect = -double(n * (n - 1) / 2 * d);
    EXPECT_NEAR(c.dual_objective, expect, 1e-9);
    EXPECT_NEAR(c.primal_objective, expect, 1e-9);
    EXPECT_NEAR(c.gap, 0, 1e-9);
    EXPECT_GE(c.min_mu, 0);
    LpSolution s = solve(build_perm_sync_lp(inst));
    EXPECT_NEAR(s.objective, c.dual_objective, 1e-7);
  }
}

TEST(Certificate, StrictConditionsImplyRecoveryAndCertificate) {
  int strict_seen = 0;
  for (auto [n, d, p] : std::vector<std::tuple<int, int, double>>{{12, 2, 0.9}, {15, 2, 0.8}, {12, 3, 0.95}}) {
    for (uint64_t seed = 0; seed < 4; ++seed) {
      Instance inst = generate({n, d, p, 1.0, seed});
      ConditionsReport r = check_conditions(inst);
      DualCertificate c = build_dual_certificate(inst);
      EXPECT_GE(c.min_lambda, 0);
      if (!r.all_strict) continue;
      ++strict_seen;
      EXPECT_TRUE(c.verified) << c.first_violation;
      EXPECT_LE(std::abs(c.gap), 1e-6);
      SolveReport s = solve_basic(inst);
      EXPECT_TRUE(s.recovered);
      EXPECT_NEAR(s.objective, c.dual_objective, 1e-6);
    }
  }
  EXPECT_GT(strict_seen, 0);
}

TEST(Certificate, KappaInvariantUnderRelabelingOthers) {
  Instance inst = generate({7, 3, 0.5, 1.0, 9});
  std::vector<int> perm(7);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 g(4);
  std::shuffle(perm.begin() + 2, perm.end(), g);
  Instance moved = relabel(inst, perm);
  for (int t = 0; t < 3; ++t) {
    EXPECT_NEAR(kappa(inst, 0, 1, t), kappa(moved, 0, 1, t), 1e-12);
    for (int q = 0; q < 3; ++q) EXPECT_NEAR(delta(inst, 0, 1, t, q), delta(moved, 0, 1, t, q), 1e-12);
  }
}

TEST(Certificate, DeltaIsAdditiveOverObjects) {
  Instance inst = generate({6, 3, 0.4, 1.0, 2});
  Oracle o(inst);
  // Drop the last object.
  Instance sub(ObjectConfig::uniform(5, 3));
  for (auto [i, j] : inst.edges)
    if (j < 5) sub.set_input(i, j, *inst.input[inst.config.pair_index(i, j)]);
  for (int t = 0; t < 3; ++t)
    for (int q = 0; q < 3; ++q)
      EXPECT_NEAR(6 * delta(inst, 0, 1, t, q) - 5 * delta(sub, 0, 1, t, q), o.summand(0, 1, t, q, 5), 1e-12);
}

TEST(Certificate, Preconditions) {
  Instance partial = generate({5, 3, 0.5, 0.5, 1});
  EXPECT_THROW(check_conditions(partial), PreconditionError);
  EXPECT_THROW(build_dual_certificate(partial), PreconditionError);
  Instance single = generate({5, 1, 1.0, 1.0, 1});
  EXPECT_THROW(kappa(single, 0, 1, 0), PreconditionError);
  EXPECT_THROW(delta(partial, 0, 1, 0, 1), PreconditionError);
  CertParams bad{-1, 1};
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Certificate, ThresholdConstraintValues) {
  auto c = threshold_constraints(1.0, 1.0, 1.0, 2);
  EXPECT_NEAR(c[0], 1, 1e-15);
  EXPECT_NEAR(c[1], 1, 1e-15);
  EXPECT_NEAR(c[2], 2, 1e-15);
  c = threshold_constraints(0.5, 1.0, 2.0, 2);
  EXPECT_NEAR(c[0], -0.125, 1e-15);
  EXPECT_NEAR(c[1], 0.203125, 1e-15);
  EXPECT_NEAR(c[2], 0.1875, 1e-15);
  EXPECT_LE(min_feasible_p(1.0, 1.0, 2), 1.0);
  double p = min_feasible_p(1.2, 1.25, 2);
  auto at = threshold_constraints(p, 1.2, 1.25, 2);
  EXPECT_GE(std::min({at[0], at[1], at[2]}), 0);
  auto below = threshold_constraints(p - 1e-3, 1.2, 1.25, 2);
  EXPECT_LT(std::min({below[0], below[1], below[2]}), 0);
}

TEST(Certificate, ThresholdForTwoElements) {
  ThresholdOptions o;
  o.grid_step = 0.02;
  ThresholdResult r = recovery_threshold(2, o);
  EXPECT_NEAR(r.p_star, 1.0 / 3.0, 0.005);
  EXPECT_LE(r.alpha, r.beta);
  auto c = threshold_constraints(r.p_star, r.alpha, r.beta, 2);
  EXPECT_GE(std::min({c[0], c[1], c[2]}), -1e-12);
  EXPECT_THROW(recovery_threshold(1), ConfigError);
}
