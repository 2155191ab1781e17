#include "jomatch/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace jomatch {

int LpModel::add_column(double lower, double upper, double cost, std::string name) {
  lower_.push_back(lower);
  upper_.push_back(upper);
  cost_.push_back(cost);
  col_names_.push_back(std::move(name));
  return num_cols() - 1;
}

int LpModel::add_row(const std::vector<int>& index, const std::vector<double>& value, RowSense sense, double rhs,
                     std::string name) {
  if (index.size() != value.size()) throw std::invalid_argument("row index/value length mismatch");
  index_.insert(index_.end(), index.begin(), index.end());
  value_.insert(value_.end(), value.begin(), value.end());
  row_start_.push_back(static_cast<int64_t>(index_.size()));
  sense_.push_back(sense);
  rhs_.push_back(rhs);
  row_names_.push_back(std::move(name));
  return num_rows() - 1;
}

double LpModel::row_activity(int r, const std::vector<double>& x) const {
  double s = 0;
  for (int64_t k = row_start_[r]; k < row_start_[r + 1]; ++k) s += value_[k] * x[index_[k]];
  return s;
}

void LpModel::validate() const {
  for (int j = 0; j < num_cols(); ++j) {
    if (std::isnan(lower_[j]) || std::isnan(upper_[j]) || !std::isfinite(cost_[j]))
      throw std::invalid_argument("column " + std::to_string(j) + " has non-finite data");
    if (lower_[j] > upper_[j]) throw std::invalid_argument("column " + std::to_string(j) + " has lower > upper");
  }
  std::vector<int> mark(num_cols(), -1);
  for (int r = 0; r < num_rows(); ++r) {
    if (!std::isfinite(rhs_[r])) throw std::invalid_argument("row " + std::to_string(r) + " has non-finite rhs");
    for (int64_t k = row_start_[r]; k < row_start_[r + 1]; ++k) {
      int j = index_[k];
      if (j < 0 || j >= num_cols()) throw std::invalid_argument("row " + std::to_string(r) + " has a bad column index");
      if (!std::isfinite(value_[k])) throw std::invalid_argument("row " + std::to_string(r) + " has a non-finite coefficient");
      if (mark[j] == r) throw std::invalid_argument("row " + std::to_string(r) + " repeats column " + std::to_string(j));
      mark[j] = r;
    }
  }
}

bool LpModel::operator==(const LpModel& o) const {
  return lower_ == o.lower_ && upper_ == o.upper_ && cost_ == o.cost_ && row_start_ == o.row_start_ &&
         index_ == o.index_ && value_ == o.value_ && sense_ == o.sense_ && rhs_ == o.rhs_;
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration-limit";
    case LpStatus::kNumericalError: return "numerical-error";
    case LpStatus::kNotSolved: return "not-solved";
  }
  return "?";
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string col_label(const LpModel& m, int j) {
  return m.col_name(j).empty() ? "x" + std::to_string(j + 1) : m.col_name(j);
}

std::string row_label(const LpModel& m, int r) {
  return m.row_name(r).empty() ? "r" + std::to_string(r + 1) : m.row_name(r);
}

void append_term(std::ostringstream& os, double v, const std::string& name, int& on_line) {
  if (on_line == 8) {
    os << "\n   ";
    on_line = 0;
  }
  os << (v < 0 ? " - " : " + ") << num(std::fabs(v)) << " " << name;
  ++on_line;
}

}  // namespace

std::string lp_file_text(const LpModel& m) {
  std::ostringstream os;
  os << "\\ " << m.num_cols() << " columns, " << m.num_rows() << " rows\n";
  os << "Minimize\n obj:";
  int on_line = 0;
  for (int j = 0; j < m.num_cols(); ++j) append_term(os, m.cost(j), col_label(m, j), on_line);
  os << "\nSubject To\n";
  for (int r = 0; r < m.num_rows(); ++r) {
    os << " " << row_label(m, r) << ":";
    on_line = 0;
    if (m.row_begin(r) == m.row_end(r)) append_term(os, 0.0, col_label(m, 0), on_line);
    for (int64_t k = m.row_begin(r); k < m.row_end(r); ++k) append_term(os, m.value(k), col_label(m, m.index(k)), on_line);
    const char* op = m.sense(r) == RowSense::kLe ? " <= " : m.sense(r) == RowSense::kGe ? " >= " : " = ";
    os << op << num(m.rhs(r)) << "\n";
  }
  os << "Bounds\n";
  for (int j = 0; j < m.num_cols(); ++j) {
    double lo = m.lower(j), up = m.upper(j);
    std::string name = col_label(m, j);
    if (lo == 0 && up == kInf) continue;
    if (lo == -kInf && up == kInf)
      os << " " << name << " free\n";
    else if (lo == up)
      os << " " << name << " = " << num(lo) << "\n";
    else
      os << " " << (lo == -kInf ? std::string("-inf") : num(lo)) << " <= " << name << " <= "
         << (up == kInf ? std::string("+inf") : num(up)) << "\n";
  }
  os << "End\n";
  return os.str();
}

void export_lp_file(const LpModel& model, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << lp_file_text(model);
}

bool LpResiduals::within_tolerances() const {
  return primal_infeasibility <= kFeasTol && dual_infeasibility <= kFeasTol && complementarity <= kCsTol &&
         gap <= kGapTol * (1 + std::fabs(primal_objective));
}

LpResiduals check_solution(const LpModel& m, const LpSolution& sol) {
  LpResiduals res;
  const int n = m.num_cols(), rows = m.num_rows();
  const auto& x = sol.x;
  const auto& y = sol.row_dual;
  std::vector<double> d(n);
  for (int j = 0; j < n; ++j) {
    d[j] = m.cost(j);
    res.primal_objective += m.cost(j) * x[j];
    res.primal_infeasibility = std::max({res.primal_infeasibility, m.lower(j) - x[j], x[j] - m.upper(j)});
  }
  for (int r = 0; r < rows; ++r) {
    double act = m.row_activity(r, x);
    double viol = 0;
    switch (m.sense(r)) {
      case RowSense::kLe: viol = act - m.rhs(r); break;
      case RowSense::kGe: viol = m.rhs(r) - act; break;
      case RowSense::kEq: viol = std::fabs(act - m.rhs(r)); break;
    }
    res.primal_infeasibility = std::max(res.primal_infeasibility, viol);
    double wrong_sign = 0;
    if (m.sense(r) == RowSense::kLe) wrong_sign = std::max(0.0, y[r]);
    if (m.sense(r) == RowSense::kGe) wrong_sign = std::max(0.0, -y[r]);
    res.dual_infeasibility = std::max(res.dual_infeasibility, wrong_sign);
    res.complementarity = std::max(res.complementarity, std::fabs(y[r]) * std::fabs(act - m.rhs(r)));
    res.dual_objective += y[r] * m.rhs(r);
    for (int64_t k = m.row_begin(r); k < m.row_end(r); ++k) d[m.index(k)] -= y[r] * m.value(k);
  }
  for (int j = 0; j < n; ++j) {
    double lo = m.lower(j), up = m.upper(j);
    if (d[j] > 0) {
      if (lo == -kInf)
        res.dual_infeasibility = std::max(res.dual_infeasibility, d[j]);
      else {
        res.dual_objective += d[j] * lo;
        res.complementarity = std::max(res.complementarity, d[j] * std::fabs(x[j] - lo));
      }
    } else if (d[j] < 0) {
      if (up == kInf)
        res.dual_infeasibility = std::max(res.dual_infeasibility, -d[j]);
      else {
        res.dual_objective += d[j] * up;
        res.complementarity = std::max(res.complementarity, -d[j] * std::fabs(up - x[j]));
      }
    }
  }
  res.gap = std::fabs(res.primal_objective - res.dual_objective);
  return res;
}

LpBackend backend_from_env(LpBackend fallback) {
  const char* v = std::getenv("JOMATCH_LP_BACKEND");
  if (!v || !*v) return fallback;
  std::string s(v);
  if (s == "builtin") return LpBackend::kBuiltin;
  if (s == "highs") return LpBackend::kHighs;
  if (s == "export-only") return LpBackend::kExportOnly;
  if (s == "auto") return LpBackend::kAuto;
  throw std::invalid_argument("JOMATCH_LP_BACKEND must be builtin, highs, auto or export-only");
}

}  // namespace jomatch
