#include "jomatch/assignment.hpp"
#include "jomatch/lp.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>

using namespace jomatch;

namespace {

LpOptions with(LpBackend b) {
  LpOptions o;
  o.backend = b;
  return o;
}

std::vector<LpBackend> backends() {
  std::vector<LpBackend> out{LpBackend::kBuiltin};
  if (highs_available()) out.push_back(LpBackend::kHighs);
  return out;
}

// Feasible bounded LP: A x <= b with x in [0, 5], b chosen so x0 is interior.
LpModel random_model(std::mt19937_64& g, int rows, int cols) {
  std::uniform_real_distribution<double> u(-1, 1);
  LpModel m;
  std::vector<double> x0(cols);
  for (int j = 0; j < cols; ++j) {
    m.add_column(0, 5, u(g));
    x0[j] = 2.5 + u(g);
  }
  for (int r = 0; r < rows; ++r) {
    std::vector<int> idx;
    std::vector<double> val;
    double act = 0;
    for (int j = 0; j < cols; ++j)
      if (g() % 3 == 0) {
        idx.push_back(j);
        val.push_back(u(g));
        act += val.back() * x0[j];
      }
    if (idx.empty()) continue;
    int kind = static_cast<int>(g() % 3);
    RowSense s = kind == 0 ? RowSense::kLe : kind == 1 ? RowSense::kGe : RowSense::kEq;
    m.add_row(idx, val, s, s == RowSense::kLe ? act + 0.5 : s == RowSense::kGe ? act - 0.5 : act);
  }
  return m;
}

}  // namespace

TEST(Lp, TrivialMaximum) {
  for (LpBackend b : backends()) {
    LpModel m;
    m.add_column(0, kInf, -1, "x");
    m.add_row({0}, {1}, RowSense::kLe, 1);
    LpSolution s = solve(m, with(b));
    ASSERT_TRUE(s.optimal());
    EXPECT_NEAR(s.x[0], 1, 1e-9);
    EXPECT_NEAR(s.objective, -1, 1e-9);
    EXPECT_TRUE(check_solution(m, s).within_tolerances());
  }
}

TEST(Lp, Infeasible) {
  for (LpBackend b : backends()) {
    LpModel m;
    m.add_column(0, kInf, 1);
    m.add_row({0}, {1}, RowSense::kGe, 1);
    m.add_row({0}, {1}, RowSense::kLe, 0);
    EXPECT_EQ(solve(m, with(b)).status, LpStatus::kInfeasible);
  }
}

TEST(Lp, Unbounded) {
  for (LpBackend b : backends()) {
    LpModel m;
    m.add_column(0, kInf, -1);
    m.add_column(0, kInf, 0);
    m.add_row({0, 1}, {1, -1}, RowSense::kLe, 1);
    EXPECT_EQ(solve(m, with(b)).status, LpStatus::kUnbounded);
  }
}

TEST(Lp, AssignmentPolytopeMatchesHungarian) {
  std::mt19937_64 g(5);
  for (int rep = 0; rep < 30; ++rep) {
    const int d = 2 + static_cast<int>(g() % 5);
    Eigen::MatrixXd c(d, d);
    for (int t = 0; t < d; ++t)
      for (int q = 0; q < d; ++q) c(t, q) = static_cast<double>(g() % 10);
    if (rep == 0) {
      c.resize(2, 2);
      c << 0, 1, 1, 0;
    }
    const int n = static_cast<int>(c.rows());
    LpModel m;
    for (int t = 0; t < n; ++t)
      for (int q = 0; q < n; ++q) m.add_column(0, kInf, c(t, q));
    for (int t = 0; t < n; ++t) {
      std::vector<int> row, col;
      for (int q = 0; q < n; ++q) {
        row.push_back(t * n + q);
        col.push_back(q * n + t);
      }
      m.add_row(row, std::vector<double>(n, 1), RowSense::kEq, 1);
      m.add_row(col, std::vector<double>(n, 1), RowSense::kEq, 1);
    }
    std::vector<int> match = max_weight_assignment(-c);
    double best = 0;
    for (int t = 0; t < n; ++t) best += c(t, match[t]);
    for (LpBackend b : backends()) {
      LpSolution s = solve(m, with(b));
      ASSERT_TRUE(s.optimal());
      EXPECT_NEAR(s.objective, best, 1e-7);
      for (double x : s.x) EXPECT_NEAR(x, std::round(x), 1e-7);
      if (rep == 0) {
        EXPECT_NEAR(s.x[0], 1, 1e-9);
        EXPECT_NEAR(s.x[3], 1, 1e-9);
      }
    }
  }
}

TEST(Lp, BackendsAgreeOnRandomModels) {
  std::mt19937_64 g(17);
  for (int rep = 0; rep < 40; ++rep) {
    LpModel m = random_model(g, 4 + static_cast<int>(g() % 20), 3 + static_cast<int>(g() % 15));
    LpSolution a = solve(m, with(LpBackend::kBuiltin));
    ASSERT_TRUE(a.optimal()) << rep;
    LpResiduals r = check_solution(m, a);
    EXPECT_TRUE(r.within_tolerances()) << rep << " gap " << r.gap << " cs " << r.complementarity;
    if (highs_available()) {
      LpSolution b = solve(m, with(LpBackend::kHighs));
      ASSERT_TRUE(b.optimal());
      EXPECT_NEAR(a.objective, b.objective, 1e-7 * (1 + std::abs(a.objective)));
      EXPECT_TRUE(check_solution(m, b).within_tolerances());
    }
  }
}

TEST(Lp, Deterministic) {
  std::mt19937_64 g(3);
  LpModel m = random_model(g, 25, 20);
  LpSolution a = solve(m, with(LpBackend::kBuiltin)), b = solve(m, with(LpBackend::kBuiltin));
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Lp, WarmStartFromOwnBasisTakesNoPivots) {
  std::mt19937_64 g(23);
  LpModel m = random_model(g, 20, 15);
  for (LpBackend b : backends()) {
    LpSolution cold = solve(m, with(b));
    ASSERT_TRUE(cold.optimal());
    LpSolution warm = solve_with_basis(m, cold.basis, with(b));
    ASSERT_TRUE(warm.optimal());
    EXPECT_EQ(warm.iterations, 0);
    EXPECT_NEAR(warm.objective, cold.objective, 1e-9);
  }
}

TEST(Lp, WarmStartAfterAddedRowMatchesCold) {
  std::mt19937_64 g(29);
  for (int rep = 0; rep < 20; ++rep) {
    LpModel m = random_model(g, 15, 12);
    LpSolution first = solve(m, with(LpBackend::kBuiltin));
    ASSERT_TRUE(first.optimal());
    std::vector<int> idx;
    std::vector<double> val;
    double act = 0;
    for (int j = 0; j < m.num_cols(); ++j) {
      idx.push_back(j);
      val.push_back(1);
      act += first.x[j];
    }
    m.add_row(idx, val, RowSense::kLe, act - 0.5);
    for (LpBackend b : backends()) {
      LpSolution warm = solve_with_basis(m, first.basis, with(b));
      LpSolution cold = solve(m, with(b));
      ASSERT_EQ(warm.status, cold.status);
      if (!cold.optimal()) continue;
      EXPECT_NEAR(warm.objective, cold.objective, 1e-7 * (1 + std::abs(cold.objective)));
      EXPECT_GE(cold.objective, first.objective - 1e-9);
    }
  }
}

TEST(Lp, IncompatibleBasisFallsBackToColdStart) {
  std::mt19937_64 g(31);
  LpModel m = random_model(g, 10, 8);
  LpBasis bogus;
  bogus.col.assign(3, VarStatus::kBasic);
  LpSolution s = solve_with_basis(m, bogus, with(LpBackend::kBuiltin));
  EXPECT_TRUE(s.optimal());
  EXPECT_NE(s.message.find("warning"), std::string::npos);
}

TEST(Lp, IncrementalMatchesCold) {
  std::mt19937_64 g(37);
  LpModel m = random_model(g, 12, 10);
  for (LpBackend b : backends()) {
    LpModel grow = m;
    IncrementalLp inc(grow, with(b));
    for (int round = 0; round < 4; ++round) {
      LpSolution a = inc.solve();
      LpSolution c = solve(grow, with(b));
      ASSERT_EQ(a.status, c.status);
      if (!c.optimal()) break;
      EXPECT_NEAR(a.objective, c.objective, 1e-7 * (1 + std::abs(c.objective)));
      grow.add_row({round % grow.num_cols(), (round + 1) % grow.num_cols()}, {1, 1}, RowSense::kLe,
                   0.5 * (c.x[round % grow.num_cols()] + c.x[(round + 1) % grow.num_cols()]));
    }
  }
}

TEST(Lp, ValidateRejectsDuplicatesAndNonFinite) {
  LpModel m;
  m.add_column(0, 1, 0);
  m.add_row({0, 0}, {1, 1}, RowSense::kLe, 1);
  EXPECT_THROW(m.validate(), std::invalid_argument);
  LpModel n;
  n.add_column(0, 1, std::nan(""));
  EXPECT_THROW(n.validate(), std::invalid_argument);
}

TEST(Lp, ExportRoundTrip) {
  LpModel m;
  m.add_column(0, kInf, -1, "x");
  m.add_column(0, 2, 1, "y");
  m.add_row({0, 1}, {1, -1}, RowSense::kLe, 1, "c1");
  m.add_row({1}, {1}, RowSense::kGe, 0.5, "c2");
  std::string text = lp_file_text(m);
  EXPECT_NE(text.find("Minimize"), std::string::npos);
  if (!highs_available()) GTEST_SKIP();
  auto path = (std::filesystem::temp_directory_path() / "jomatch_roundtrip.lp").string();
  export_lp_file(m, path);
  LpFileSummary s = read_lp_file_with_highs(path);
  std::remove(path.c_str());
  EXPECT_EQ(s.num_cols, 2);
  EXPECT_EQ(s.num_rows, 2);
  EXPECT_EQ(s.status, LpStatus::kOptimal);
  EXPECT_NEAR(s.objective, solve(m).objective, 1e-9);
}

TEST(Lp, ExportOnlyBackendWritesFile) {
  auto path = (std::filesystem::temp_directory_path() / "jomatch_export_only.lp").string();
  LpModel m;
  m.add_column(0, kInf, -1);
  m.add_row({0}, {1}, RowSense::kLe, 1);
  LpOptions o = with(LpBackend::kExportOnly);
  o.export_path = path;
  EXPECT_EQ(solve(m, o).status, LpStatus::kNotSolved);
  EXPECT_TRUE(std::filesystem::exists(path));
  std::remove(path.c_str());
}

TEST(Assignment, MatchesBruteForce) {
  std::mt19937_64 g(41);
  for (int rep = 0; rep < 200; ++rep) {
    const int r = 1 + static_cast<int>(g() % 5), c = 1 + static_cast<int>(g() % 5);
    Eigen::MatrixXd w(r, c);
    for (int t = 0; t < r; ++t)
      for (int q = 0; q < c; ++q) w(t, q) = static_cast<double>(g() % 7);
    std::vector<int> m = max_weight_assignment(w);
    double got = 0;
    for (int t = 0; t < r; ++t)
      if (m[t] >= 0) got += w(t, m[t]);
    // Brute force over injections of rows into columns or nothing.
    double best = 0;
    std::vector<int> used(c, 0);
    std::function<void(int, double)> go = [&](int t, double acc) {
      if (t == r) {
        best = std::max(best, acc);
        return;
      }
      go(t + 1, acc);
      for (int q = 0; q < c; ++q)
        if (!used[q]) {
          used[q] = 1;
          go(t + 1, acc + w(t, q));
          used[q] = 0;
        }
    };
    go(0, 0);
    EXPECT_NEAR(got, best, 1e-9);
  }
}
