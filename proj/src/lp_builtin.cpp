#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>

#include "jomatch/lp.hpp"

namespace jomatch {
namespace {

// Bounded revised primal simplex on [A -I] (x, s) = 0, where s holds the row
// activities. The basis inverse is kept dense and updated by row operations,
// with a fresh LU inverse every kRefactor pivots. A composite phase 1 drives
// the basic variables into their bounds. Dantzig pricing switches to Bland's
// rule while degenerate pivots stall.
class DenseSimplex {
 public:
  DenseSimplex(const LpModel& model, const LpOptions& options) : m_(model), opt_(options) {
    n_ = model.num_cols();
    rows_ = model.num_rows();
    total_ = n_ + rows_;
    lo_.resize(total_);
    up_.resize(total_);
    cost_.assign(total_, 0.0);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = model.lower(j);
      up_[j] = model.upper(j);
      cost_[j] = model.cost(j);
    }
    for (int r = 0; r < rows_; ++r) {
      int v = n_ + r;
      switch (model.sense(r)) {
        case RowSense::kLe: lo_[v] = -kInf; up_[v] = model.rhs(r); break;
        case RowSense::kGe: lo_[v] = model.rhs(r); up_[v] = kInf; break;
        case RowSense::kEq: lo_[v] = up_[v] = model.rhs(r); break;
      }
    }
    // Column-major copy of A.
    col_start_.assign(n_ + 1, 0);
    for (int64_t k = 0; k < model.num_nonzeros(); ++k) ++col_start_[model.index(k) + 1];
    for (int j = 0; j < n_; ++j) col_start_[j + 1] += col_start_[j];
    col_row_.resize(model.num_nonzeros());
    col_val_.resize(model.num_nonzeros());
    std::vector<int64_t> fill(col_start_.begin(), col_start_.end() - 1);
    for (int r = 0; r < rows_; ++r)
      for (int64_t k = model.row_begin(r); k < model.row_end(r); ++k) {
        int j = model.index(k);
        col_row_[fill[j]] = r;
        col_val_[fill[j]++] = model.value(k);
      }
  }

  LpSolution run(const LpBasis* warm) {
    LpSolution sol;
    sol.backend = "builtin";
    if (warm && !warm->empty()) {
      if (!load_basis(*warm)) {
        sol.message = "warning: incompatible warm basis, cold start";
        slack_basis();
      }
    } else {
      slack_basis();
    }
    if (!refactor()) {
      sol.message = "warning: singular warm basis, cold start";
      slack_basis();
      refactor();
    }
    const int64_t limit =
        opt_.max_iterations >= 0 ? opt_.max_iterations : 10000 + 50 * static_cast<int64_t>(total_);
    auto start = std::chrono::steady_clock::now();
    LpStatus status = LpStatus::kIterationLimit;
    int since_refactor = 0;
    int degenerate_run = 0;
    bool bland = false;
    int64_t iter = 0;
    for (;;) {
      if (since_refactor >= kRefactor) {
        if (!refactor()) {
          status = LpStatus::kNumericalError;
          break;
        }
        since_refactor = 0;
      }
      Eigen::VectorXd expected = cb_;
      bool phase1 = compute_phase_costs();
      if (!duals_valid_ || since_refactor == 0 || expected.size() != cb_.size() || expected != cb_) compute_duals();
      int enter = -1;
      int dir = 0;
      choose_entering(bland, enter, dir);
      if (enter < 0) {
        if (since_refactor > 0) {
          // Confirm with a fresh factorisation before declaring termination.
          if (!refactor()) {
            status = LpStatus::kNumericalError;
            break;
          }
          since_refactor = 0;
          continue;
        }
        status = phase1 ? LpStatus::kInfeasible : LpStatus::kOptimal;
        break;
      }
      if (iter >= limit) break;
      if (std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() > opt_.time_limit) break;
      column(enter, alpha_);
      int leave_pos = -1;
      double theta = ratio_test(enter, dir, phase1, bland, leave_pos);
      if (theta == kInf) {
        status = phase1 ? LpStatus::kNumericalError : LpStatus::kUnbounded;
        break;
      }
      ++iter;
      ++since_refactor;
      if (theta <= kDegenerate) {
        if (++degenerate_run > kStall) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
      const double d_enter = reduced_cost(enter);
      pivot(enter, dir, theta, leave_pos, d_enter);
    }
    sol.status = status;
    sol.iterations = iter;
    finish(sol);
    return sol;
  }

 private:
  static constexpr int kRefactor = 64;
  static constexpr int kStall = 50;
  static constexpr double kPrimalTol = 1e-9;
  static constexpr double kDualTol = 1e-9;
  static constexpr double kPivotTol = 1e-9;
  static constexpr double kDegenerate = 1e-12;

  double nonbasic_value(int j, VarStatus s) const {
    if (s == VarStatus::kUpper) return up_[j];
    if (s == VarStatus::kLower) return lo_[j];
    return 0.0;
  }

  VarStatus default_status(int j) const {
    if (lo_[j] > -kInf) return VarStatus::kLower;
    if (up_[j] < kInf) return VarStatus::kUpper;
    return VarStatus::kFree;
  }

  void slack_basis() {
    status_.assign(total_, VarStatus::kLower);
    head_.resize(rows_);
    for (int j = 0; j < n_; ++j) status_[j] = default_status(j);
    for (int r = 0; r < rows_; ++r) {
      head_[r] = n_ + r;
      status_[n_ + r] = VarStatus::kBasic;
    }
  }

  bool load_basis(const LpBasis& b) {
    if (static_cast<int>(b.col.size()) != n_ || static_cast<int>(b.row.size()) > rows_) return false;
    status_.assign(total_, VarStatus::kLower);
    head_.clear();
    auto fix = [&](int j, VarStatus s) {
      if (s == VarStatus::kBasic) {
        head_.push_back(j);
        return VarStatus::kBasic;
      }
      if (s == VarStatus::kLower && lo_[j] == -kInf) return default_status(j);
      if (s == VarStatus::kUpper && up_[j] == kInf) return default_status(j);
      if (s == VarStatus::kFree && (lo_[j] > -kInf || up_[j] < kInf)) return default_status(j);
      return s;
    };
    for (int j = 0; j < n_; ++j) status_[j] = fix(j, b.col[j]);
    for (int r = 0; r < rows_; ++r) {
      VarStatus s = r < static_cast<int>(b.row.size()) ? b.row[r] : VarStatus::kBasic;
      status_[n_ + r] = fix(n_ + r, s);
    }
    return static_cast<int>(head_.size()) == rows_;
  }

  // B = [A_S  -I_R]: with N the rows whose slack is nonbasic, the structural
  // part solves through the |S| x |S| kernel A(N,S) and the slack rows follow.
  bool refactor() {
    std::vector<int> kernel_row(rows_, -1), struct_pos, struct_col, rows_n;
    std::vector<int> col_slot(n_, -1);
    for (int p = 0; p < rows_; ++p) {
      int j = head_[p];
      if (j < n_) {
        col_slot[j] = static_cast<int>(struct_col.size());
        struct_col.push_back(j);
        struct_pos.push_back(p);
      } else {
        kernel_row[j - n_] = -2;
      }
    }
    for (int r = 0; r < rows_; ++r)
      if (kernel_row[r] == -1) {
        kernel_row[r] = static_cast<int>(rows_n.size());
        rows_n.push_back(r);
      } else {
        kernel_row[r] = -1;
      }
    const int k = static_cast<int>(struct_col.size());
    if (static_cast<int>(rows_n.size()) != k) return false;
    Eigen::MatrixXd kinv;
    if (k > 0) {
      Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(k, k);
      for (int b = 0; b < k; ++b) {
        int j = struct_col[b];
        for (int64_t e = col_start_[j]; e < col_start_[j + 1]; ++e)
          if (kernel_row[col_row_[e]] >= 0) kernel(kernel_row[col_row_[e]], b) = col_val_[e];
      }
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(kernel);
      if (!(lu.rcond() > 1e-13)) return false;
      kinv = lu.inverse();
    }
    binv_.setZero(rows_, rows_);
    for (int b = 0; b < k; ++b)
      for (int a = 0; a < k; ++a) binv_(struct_pos[b], rows_n[a]) = kinv(b, a);
    for (int p = 0; p < rows_; ++p) {
      int j = head_[p];
      if (j < n_) continue;
      int r = j - n_;
      binv_(p, r) = -1.0;
      for (int64_t e = m_.row_begin(r); e < m_.row_end(r); ++e) {
        int b = col_slot[m_.index(e)];
        if (b < 0) continue;
        double v = m_.value(e);
        for (int a = 0; a < k; ++a) binv_(p, rows_n[a]) += v * kinv(b, a);
      }
    }
    x_.assign(total_, 0.0);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows_);
    for (int j = 0; j < total_; ++j) {
      if (status_[j] == VarStatus::kBasic) continue;
      x_[j] = nonbasic_value(j, status_[j]);
      if (x_[j] == 0.0) continue;
      if (j < n_) {
        for (int64_t k = col_start_[j]; k < col_start_[j + 1]; ++k) rhs(col_row_[k]) -= col_val_[k] * x_[j];
      } else {
        rhs(j - n_) += x_[j];
      }
    }
    Eigen::VectorXd xb = binv_ * rhs;
    for (int p = 0; p < rows_; ++p) x_[head_[p]] = xb(p);
    return true;
  }

  // Sets phase costs for the basis; returns true when in phase 1.
  bool compute_phase_costs() {
    cb_.setZero(rows_);
    bool infeasible = false;
    for (int p = 0; p < rows_; ++p) {
      int j = head_[p];
      if (x_[j] < lo_[j] - kPrimalTol) {
        cb_(p) = -1.0;
        infeasible = true;
      } else if (x_[j] > up_[j] + kPrimalTol) {
        cb_(p) = 1.0;
        infeasible = true;
      }
    }
    phase1_ = infeasible;
    if (!infeasible)
      for (int p = 0; p < rows_; ++p) cb_(p) = cost_[head_[p]];
    return infeasible;
  }

  void compute_duals() {
    y_ = binv_.transpose() * cb_;
    duals_valid_ = true;
  }

  double reduced_cost(int j) const {
    if (j >= n_) return y_(j - n_);
    double d = phase1_ ? 0.0 : cost_[j];
    for (int64_t k = col_start_[j]; k < col_start_[j + 1]; ++k) d -= y_(col_row_[k]) * col_val_[k];
    return d;
  }

  void choose_entering(bool bland, int& enter, int& dir) {
    double best = 0;
    for (int j = 0; j < total_; ++j) {
      VarStatus s = status_[j];
      if (s == VarStatus::kBasic || lo_[j] == up_[j]) continue;
      double d = reduced_cost(j);
      int sdir = 0;
      if ((s == VarStatus::kLower || s == VarStatus::kFree) && d < -kDualTol) sdir = 1;
      if ((s == VarStatus::kUpper || s == VarStatus::kFree) && d > kDualTol) sdir = -1;
      if (sdir == 0) continue;
      if (bland) {
        enter = j;
        dir = sdir;
        return;
      }
      if (std::fabs(d) > best) {
        best = std::fabs(d);
        enter = j;
        dir = sdir;
      }
    }
  }

  void column(int j, Eigen::VectorXd& out) const {
    if (j < n_) {
      out.setZero(rows_);
      for (int64_t k = col_start_[j]; k < col_start_[j + 1]; ++k) out.noalias() += col_val_[k] * binv_.col(col_row_[k]);
    } else {
      out = -binv_.col(j - n_);
    }
  }

  double ratio_test(int enter, int dir, bool phase1, bool bland, int& leave_pos) {
    double theta = kInf;
    if (lo_[enter] > -kInf && up_[enter] < kInf) theta = up_[enter] - lo_[enter];
    leave_pos = -1;
    double best_pivot = 0;
    for (int p = 0; p < rows_; ++p) {
      double a = alpha_(p);
      if (std::fabs(a) <= kPivotTol) continue;
      int j = head_[p];
      double rate = -dir * a;
      double xj = x_[j];
      double limit = kInf;
      bool to_lower = false;
      if (phase1 && xj < lo_[j] - kPrimalTol) {
        if (rate > 0) limit = (lo_[j] - xj) / rate, to_lower = true;
      } else if (phase1 && xj > up_[j] + kPrimalTol) {
        if (rate < 0) limit = (xj - up_[j]) / -rate;
      } else if (rate < 0) {
        if (lo_[j] > -kInf) limit = std::max(0.0, (xj - lo_[j]) / -rate), to_lower = true;
      } else if (up_[j] < kInf) {
        limit = std::max(0.0, (up_[j] - xj) / rate);
      }
      if (limit == kInf) continue;
      bool take = false;
      if (limit < theta - kDegenerate)
        take = true;
      else if (limit <= theta + kDegenerate)
        take = leave_pos < 0 || (bland ? j < head_[leave_pos] : std::fabs(a) > best_pivot);
      if (take) {
        theta = std::min(theta, limit);
        leave_pos = p;
        best_pivot = std::fabs(a);
        leave_to_lower_ = to_lower;
      }
    }
    return theta;
  }

  // Updates x, the inverse and (when the phase costs stay put) the duals.
  void pivot(int enter, int dir, double theta, int leave_pos, double d_enter) {
    double step = dir * theta;
    x_[enter] += step;
    for (int p = 0; p < rows_; ++p) x_[head_[p]] -= step * alpha_(p);
    if (leave_pos < 0) {
      status_[enter] = dir > 0 ? VarStatus::kUpper : VarStatus::kLower;
      x_[enter] = nonbasic_value(enter, status_[enter]);
      return;
    }
    int leave = head_[leave_pos];
    status_[leave] = leave_to_lower_ ? VarStatus::kLower : VarStatus::kUpper;
    x_[leave] = nonbasic_value(leave, status_[leave]);
    status_[enter] = VarStatus::kBasic;
    head_[leave_pos] = enter;
    // Row-operation update of the inverse.
    double piv = alpha_(leave_pos);
    Eigen::RowVectorXd prow = binv_.row(leave_pos) / piv;
    y_.noalias() += d_enter * prow.transpose();
    cb_(leave_pos) = phase1_ ? 0.0 : cost_[enter];
    for (int p = 0; p < rows_; ++p) {
      if (p == leave_pos || alpha_(p) == 0.0) continue;
      binv_.row(p).noalias() -= alpha_(p) * prow;
    }
    binv_.row(leave_pos) = prow;
  }

  void finish(LpSolution& sol) {
    refactor();
    compute_phase_costs();
    if (sol.status == LpStatus::kOptimal && phase1_) sol.status = LpStatus::kNumericalError;
    compute_duals();
    sol.x.assign(x_.begin(), x_.begin() + n_);
    sol.row_activity.assign(x_.begin() + n_, x_.end());
    sol.row_dual.resize(rows_);
    for (int r = 0; r < rows_; ++r) sol.row_dual[r] = y_(r);
    sol.reduced_cost.resize(n_);
    sol.objective = 0;
    for (int j = 0; j < n_; ++j) {
      sol.reduced_cost[j] = reduced_cost(j);
      sol.objective += cost_[j] * x_[j];
    }
    sol.basis.col.assign(status_.begin(), status_.begin() + n_);
    sol.basis.row.assign(status_.begin() + n_, status_.end());
  }

  const LpModel& m_;
  const LpOptions& opt_;
  int n_ = 0, rows_ = 0, total_ = 0;
  std::vector<double> lo_, up_, cost_;
  std::vector<int64_t> col_start_;
  std::vector<int> col_row_;
  std::vector<double> col_val_;
  std::vector<VarStatus> status_;
  std::vector<int> head_;
  std::vector<double> x_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd cb_, y_, alpha_;
  bool phase1_ = false;
  bool duals_valid_ = false;
  bool leave_to_lower_ = false;
};

}  // namespace

LpSolution solve_builtin(const LpModel& model, const LpBasis* warm, const LpOptions& options) {
  DenseSimplex simplex(model, options);
  return simplex.run(warm);
}

}  // namespace jomatch
