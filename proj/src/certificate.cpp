#include "jomatch/certificate.hpp"

#include "jomatch/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace jomatch {

namespace {
constexpr double kMarginTol = 1e-12;
constexpr double kDualTol = 1e-9;
}  // namespace

void CertParams::validate() const {
  if (!(alpha > 0) || !(beta > 0)) throw ConfigError("alpha and beta must be positive");
}

void require_complete_perm_sync(const Instance& inst) {
  if (!inst.complete()) throw PreconditionError("the certificate needs a complete map graph");
  if (!inst.permutation_shaped()) throw PreconditionError("the certificate needs permutation blocks of equal size");
  if (inst.config.size(0) < 2) throw PreconditionError("the certificate needs d >= 2");
}

namespace {

double delta_with(const CostTensor& a, int n, int d, int i, int j, int t, int q, const CertParams& params) {
  const double al = params.alpha, bd = params.beta * d;
  double sum = 0;
  for (int k = 0; k < n; ++k) {
    if (k == i || k == j || a(k, i, t, t) != -1) continue;
    sum += (a(k, j, t, q) - a(i, j, t, q)) / al + (a(i, j, t, t) - a(k, j, t, t)) / bd;
  }
  return sum / n;
}

double kappa_with(const CostTensor& a, int n, int d, int i, int j, int t, const CertParams& params) {
  const double al = params.alpha, bd = params.beta * d;
  double first = 0, diag = 0, last = 0;
  for (int l = 0; l < d; ++l) {
    if (l == t) continue;
    for (int k = 0; k < n; ++k) {
      if (k == i || k == j) continue;
      first += std::min(a(k, i, l, t) / al + a(k, j, t, t) / bd, a(k, j, l, t) / al + a(k, i, t, t) / bd);
    }
    last += (a(i, j, t, l) + a(j, i, t, l)) / al + 2 * a(i, j, t, t) / bd;
  }
  for (int k = 0; k < n; ++k) {
    if (k != i) diag += a(k, i, t, t);
    if (k != j) diag += a(k, j, t, t);
  }
  return first / n + (1 / (2 * al) - (d - 1) / (2 * bd)) * diag / n - (d - 2) / al + 1 + last / (2 * n);
}

}  // namespace

double kappa(const Instance& inst, int i, int j, int t, const CertParams& params) {
  params.validate();
  require_complete_perm_sync(inst);
  const CostTensor a(inst);
  return kappa_with(a, inst.config.n(), inst.config.size(0), i, j, t, params);
}

double delta(const Instance& inst, int i, int j, int t, int q, const CertParams& params) {
  params.validate();
  require_complete_perm_sync(inst);
  const CostTensor a(inst);
  return delta_with(a, inst.config.n(), inst.config.size(0), i, j, t, q, params);
}

const char* to_string(Case c) {
  static const char* names[] = {"C1", "C2", "C3", "C4", "C5", "unclassified"};
  return names[static_cast<int>(c)];
}

const char* to_string(Verdict v) {
  static const char* names[] = {"strict", "weak", "fail"};
  return names[static_cast<int>(v)];
}

ConditionsReport check_conditions(const Instance& inst, const CertParams& params) {
  params.validate();
  require_complete_perm_sync(inst);
  const CostTensor a(inst);
  const ObjectConfig& c = inst.config;
  const int n = c.n(), d = c.size(0);
  ConditionsReport rep;
  rep.min_margin = std::numeric_limits<double>::infinity();
  rep.kappa.resize(static_cast<size_t>(c.num_pairs()) * d);
  for (int p = 0; p < c.num_pairs(); ++p) {
    auto [i, j] = c.pair_at(p);
    for (int t = 0; t < d; ++t) rep.kappa[static_cast<size_t>(p) * d + t] = kappa_with(a, n, d, i, j, t, params);
  }
  for (int p = 0; p < c.num_pairs(); ++p) {
    auto [i, j] = c.pair_at(p);
    for (int t = 0; t < d; ++t)
      for (int q = 0; q < d; ++q) {
        if (t == q) continue;
        const int att = a(i, j, t, t), aqq = a(i, j, q, q), atq = a(i, j, t, q);
        const double kt = rep.kappa[static_cast<size_t>(p) * d + t];
        const double kq = rep.kappa[static_cast<size_t>(p) * d + q];
        const double d1 = delta_with(a, n, d, i, j, t, q, params);
        const double d2 = delta_with(a, n, d, j, i, q, t, params);
        CaseRecord rec{i, j, t, q};
        if (att == 1 && aqq == 1 && atq == 1) {
          rec.kind = Case::kC1;
          rec.margin = std::min(d1, d2);
        } else if (att == 1 && aqq == 1 && atq == -1) {
          rec.kind = Case::kC2;
          rec.margin = std::min(d1 - 1, d2 - 1);
        } else if (att == -1 && aqq == -1 && atq == 1) {
          rec.kind = Case::kC3;
          rec.margin = std::min(kt, kq) + (d1 + d2) / 2;
        } else if (att == 1 && aqq == -1 && atq == 1) {
          rec.kind = Case::kC4;
          rec.margin = kq + d1 + d2;
        } else if (att == -1 && aqq == 1 && atq == 1) {
          rec.kind = Case::kC5;
          rec.margin = kt + d1 + d2;
        } else {
          rec.kind = Case::kUnclassified;
          rec.margin = -std::numeric_limits<double>::infinity();
        }
        rec.verdict = rec.margin > kMarginTol ? Verdict::kStrict : rec.margin >= -kMarginTol ? Verdict::kWeak : Verdict::kFail;
        ++rep.counts[static_cast<int>(rec.kind)][static_cast<int>(rec.verdict)];
        ++rep.cells;
        rep.min_margin = std::min(rep.min_margin, rec.margin);
        if (rec.verdict != Verdict::kStrict) {
          rep.all_strict = false;
          if (rep.worst.size() < 100) rep.worst.push_back(rec);
        }
      }
  }
  return rep;
}

namespace {

// Kinds of the permutation problem's triangle rows mapped to the (-,+,+),
// (+,-,+), (+,+,-) numbering of TriangleRow.
int tri_kind(int perm_kind) { return 3 - perm_kind; }

struct LambdaStore {
  const ObjectConfig& c;
  std::unordered_map<int64_t, double>& values;
  std::string* first_violation;

  void set(int i, int j, int k, int l, int t, int q, int perm_kind, double v) {
    if (v == 0) return;
    TriangleRow row{i, j, k, l, t, q, tri_kind(perm_kind)};
    int64_t id = triangle_row_id(c, row);
    auto [it, fresh] = values.emplace(id, v);
    if (!fresh && first_violation->empty())
      *first_violation = "multiplier of triangle row " + std::to_string(id) + " assigned twice";
    if (!fresh) it->second = v;
  }
  double get(int i, int j, int k, int l, int t, int q, int perm_kind) const {
    auto it = values.find(triangle_row_id(c, {i, j, k, l, t, q, tri_kind(perm_kind)}));
    return it == values.end() ? 0.0 : it->second;
  }
};

}  // namespace

DualCertificate build_dual_certificate(const Instance& inst, const CertParams& params) {
  params.validate();
  require_complete_perm_sync(inst);
  const CostTensor a(inst);
  const ObjectConfig& c = inst.config;
  const int n = c.n(), d = c.size(0);
  const double al = params.alpha, bd = params.beta * d;
  DualCertificate cert;
  LambdaStore lam{c, cert.lambda, &cert.first_violation};

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int t = 0; t < d; ++t) {
        if (a(i, j, t, t) != -1) continue;
        for (int k = 0; k < n; ++k) {
          if (k == i || k == j) continue;
          for (int q = 0; q < d; ++q) {
            if (q == t) continue;
            const double x = ((a(j, k, t, q) - a(i, k, t, q)) / al + (a(i, k, t, t) - a(j, k, t, t)) / bd) / n;
            const double pos = std::max(x, 0.0), neg = std::max(-x, 0.0);
            if (k < i) {
              lam.set(k, i, j, q, t, t, 1, pos);
              lam.set(k, i, j, q, t, t, 3, neg);
            } else if (k < j) {
              lam.set(i, k, j, t, q, t, 2, pos);
              lam.set(i, k, j, t, q, t, 3, neg);
            } else {
              lam.set(i, j, k, t, t, q, 1, neg);
              lam.set(i, j, k, t, t, q, 2, pos);
            }
          }
        }
      }

  // A^T lambda accumulated row by row.
  std::vector<double> lterm(static_cast<size_t>(c.num_vars()), 0.0);
  double lambda_sum = 0;
  cert.min_lambda = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        for (int l = 0; l < d; ++l)
          for (int t = 0; t < d; ++t)
            for (int q = 0; q < d; ++q)
              for (int kind = 0; kind < 3; ++kind) {
                TriangleRow row{i, j, k, l, t, q, kind};
                auto it = cert.lambda.find(triangle_row_id(c, row));
                if (it == cert.lambda.end()) continue;
                const double v = it->second;
                lambda_sum += v;
                cert.min_lambda = std::min(cert.min_lambda, v);
                LinearForm f = triangle_form(c, row);
                int at_truth = 0;
                for (size_t e = 0; e < 3; ++e) lterm[f.var[e]] += f.coef[e] * v;
                at_truth = f.coef[0] * (l == t) + f.coef[1] * (t == q) + f.coef[2] * (l == q);
                if (v > 0 && at_truth != 1) {
                  ++cert.complementarity_violations;
                  if (cert.first_violation.empty())
                    cert.first_violation = "positive multiplier on slack triangle row " + std::to_string(triangle_row_id(c, row));
                }
              }

  cert.r.assign(static_cast<size_t>(c.num_pairs()) * d, 0.0);
  cert.mu.assign(static_cast<size_t>(c.num_vars()), 0.0);
  cert.min_mu = std::numeric_limits<double>::infinity();
  double r_sum = 0;
  for (int p = 0; p < c.num_pairs(); ++p) {
    auto [i, j] = c.pair_at(p);
    for (int t = 0; t < d; ++t) {
      double rt = -(a(i, j, t, t) + lterm[c.var(i, j, t, t)]) / 2;
      cert.r[static_cast<size_t>(p) * d + t] = rt;
      r_sum += rt;
      cert.primal_objective += a(i, j, t, t);
    }
    for (int t = 0; t < d; ++t)
      for (int q = 0; q < d; ++q) {
        const int64_t v = c.var(i, j, t, q);
        const double rt = cert.r[static_cast<size_t>(p) * d + t], rq = cert.r[static_cast<size_t>(p) * d + q];
        const double m = a(i, j, t, q) + rt + rq + lterm[v];
        cert.mu[v] = t == q ? 0.0 : m;
        cert.max_dual_residual = std::max(cert.max_dual_residual, std::fabs(m - cert.mu[v]));
        if (t != q) {
          cert.min_mu = std::min(cert.min_mu, m);
          if (m < -kDualTol && cert.first_violation.empty())
            cert.first_violation = "dual row (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
                                   std::to_string(t + 1) + "," + std::to_string(q + 1) + ") needs mu = " +
                                   std::to_string(m) + " < 0";
        }
      }
  }

  // Independent evaluation of the multiplier sum of every dual row, indexed
  // the way the dual problem is written out.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int t = 0; t < d; ++t)
        for (int q = 0; q < d; ++q) {
          double s = 0;
          for (int l = 0; l < d; ++l) {
            for (int k = 0; k < i; ++k)
              s += lam.get(k, i, j, l, t, q, 1) - lam.get(k, i, j, l, t, q, 2) + lam.get(k, i, j, l, t, q, 3);
            for (int k = i + 1; k < j; ++k)
              s += -lam.get(i, k, j, t, l, q, 1) + lam.get(i, k, j, t, l, q, 2) + lam.get(i, k, j, t, l, q, 3);
            for (int k = j + 1; k < n; ++k)
              s += lam.get(i, j, k, t, q, l, 1) + lam.get(i, j, k, t, q, l, 2) - lam.get(i, j, k, t, q, l, 3);
          }
          cert.max_formula_mismatch = std::max(cert.max_formula_mismatch, std::fabs(s - lterm[c.var(i, j, t, q)]));
        }

  cert.dual_objective = -lambda_sum - 2 * r_sum;
  cert.gap = std::fabs(cert.dual_objective - cert.primal_objective);
  if (cert.min_lambda < 0 && cert.first_violation.empty()) cert.first_violation = "negative multiplier";
  if (cert.max_formula_mismatch > kDualTol && cert.first_violation.empty())
    cert.first_violation = "dual row sums disagree between evaluations";
  if (cert.gap > 1e-6 && cert.first_violation.empty()) cert.first_violation = "duality gap " + std::to_string(cert.gap);
  cert.verified = cert.first_violation.empty();
  return cert;
}

}  // namespace jomatch
