#pragma once

#include "jomatch/instance.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace jomatch {

struct CertParams {
  double alpha = 1.172;
  double beta = 1.657;
  void validate() const;
};

// Throws PreconditionError unless the instance is complete, every block is a
// permutation matrix and d >= 2.
void require_complete_perm_sync(const Instance& inst);

double kappa(const Instance& inst, int i, int j, int t, const CertParams& params = {});
// delta_{t->q}^{i->j}; i and j may come in either order.
double delta(const Instance& inst, int i, int j, int t, int q, const CertParams& params = {});

enum class Case { kC1 = 0, kC2, kC3, kC4, kC5, kUnclassified };
enum class Verdict { kStrict = 0, kWeak, kFail };
const char* to_string(Case c);
const char* to_string(Verdict v);

struct CaseRecord {
  int i = 0, j = 0, t = 0, q = 0;
  Case kind = Case::kUnclassified;
  Verdict verdict = Verdict::kFail;
  double margin = 0;  // smallest left-hand side minus right-hand side
};

struct ConditionsReport {
  std::array<std::array<int64_t, 3>, 6> counts{};  // [case][verdict]
  bool all_strict = true;
  double min_margin = 0;
  std::vector<double> kappa;     // by (pair, t)
  std::vector<CaseRecord> worst;  // non-strict records, at most 100
  int64_t cells = 0;
};

ConditionsReport check_conditions(const Instance& inst, const CertParams& params = {});

struct DualCertificate {
  // Multipliers of the triangle rows by triangle_row_id, rows numbered in the
  // permutation problem's order: kind 1 (+,+,-), kind 2 (+,-,+), kind 3 (-,+,+).
  std::unordered_map<int64_t, double> lambda;
  std::vector<double> r;   // by (pair, t); c equals r
  std::vector<double> mu;  // by column
  double dual_objective = 0;
  double primal_objective = 0;
  double gap = 0;
  double min_lambda = 0;
  double min_mu = 0;
  double max_dual_residual = 0;        // balance of every dual row
  double max_formula_mismatch = 0;     // generic vs index-by-index dual rows
  int64_t complementarity_violations = 0;
  bool verified = false;
  std::string first_violation;
};

DualCertificate build_dual_certificate(const Instance& inst, const CertParams& params = {});

// Problem of the recovery threshold for fixed d.
struct ThresholdResult {
  double p_star = 1;
  double alpha = 1;
  double beta = 1;
};
struct ThresholdOptions {
  double grid_step = 0.005;
  double p_step = 1e-4;
  int threads = 1;
};
// Left-hand sides of the three polynomial constraints (feasible when all >= 0).
std::array<double, 3> threshold_constraints(double p, double alpha, double beta, int d);
// Smallest feasible p in [1/4, 1] for fixed (alpha, beta), or 2 when none.
double min_feasible_p(double alpha, double beta, int d, double p_step = 1e-4);
ThresholdResult recovery_threshold(int d, const ThresholdOptions& options = {});

}  // namespace jomatch
