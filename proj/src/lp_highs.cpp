#include "jomatch/lp.hpp"

#include <stdexcept>

#ifdef JOMATCH_HAVE_HIGHS
#include "Highs.h"
#endif

namespace jomatch {

#ifdef JOMATCH_HAVE_HIGHS
namespace {

HighsBasisStatus to_highs(VarStatus s) {
  switch (s) {
    case VarStatus::kLower: return HighsBasisStatus::kLower;
    case VarStatus::kUpper: return HighsBasisStatus::kUpper;
    case VarStatus::kBasic: return HighsBasisStatus::kBasic;
    case VarStatus::kFree: return HighsBasisStatus::kZero;
  }
  return HighsBasisStatus::kNonbasic;
}

VarStatus from_highs(HighsBasisStatus s) {
  switch (s) {
    case HighsBasisStatus::kLower: return VarStatus::kLower;
    case HighsBasisStatus::kUpper: return VarStatus::kUpper;
    case HighsBasisStatus::kBasic: return VarStatus::kBasic;
    default: return VarStatus::kFree;
  }
}

void row_bounds(const LpModel& m, int r, double& lo, double& up) {
  lo = -kInf;
  up = kInf;
  if (m.sense(r) != RowSense::kLe) lo = m.rhs(r);
  if (m.sense(r) != RowSense::kGe) up = m.rhs(r);
}

void configure(Highs& h, const LpOptions& o) {
  h.setOptionValue("output_flag", false);
  h.setOptionValue("solver", "simplex");
  h.setOptionValue("threads", 1);
  h.setOptionValue("random_seed", 0);
  h.setOptionValue("presolve", "off");
  h.setOptionValue("primal_feasibility_tolerance", 1e-9);
  h.setOptionValue("dual_feasibility_tolerance", 1e-9);
  if (o.time_limit < kInf) h.setOptionValue("time_limit", o.time_limit);
  if (o.max_iterations >= 0) h.setOptionValue("simplex_iteration_limit", static_cast<HighsInt>(o.max_iterations));
}

void pass_rows(Highs& h, const LpModel& m, int from) {
  const int count = m.num_rows() - from;
  if (count <= 0) return;
  std::vector<double> lo(count), up(count);
  std::vector<HighsInt> start(count), index;
  std::vector<double> value;
  for (int r = from; r < m.num_rows(); ++r) {
    row_bounds(m, r, lo[r - from], up[r - from]);
    start[r - from] = static_cast<HighsInt>(index.size());
    for (int64_t k = m.row_begin(r); k < m.row_end(r); ++k) {
      index.push_back(m.index(k));
      value.push_back(m.value(k));
    }
  }
  h.addRows(count, lo.data(), up.data(), static_cast<HighsInt>(index.size()), start.data(), index.data(), value.data());
}

void pass_model(Highs& h, const LpModel& m) {
  HighsLp lp;
  lp.num_col_ = m.num_cols();
  lp.num_row_ = 0;
  lp.col_cost_.resize(m.num_cols());
  lp.col_lower_.resize(m.num_cols());
  lp.col_upper_.resize(m.num_cols());
  for (int j = 0; j < m.num_cols(); ++j) {
    lp.col_cost_[j] = m.cost(j);
    lp.col_lower_[j] = m.lower(j);
    lp.col_upper_[j] = m.upper(j);
  }
  lp.a_matrix_.format_ = MatrixFormat::kColwise;
  lp.a_matrix_.num_col_ = m.num_cols();
  lp.a_matrix_.num_row_ = 0;
  lp.a_matrix_.start_.assign(m.num_cols() + 1, 0);
  h.passModel(std::move(lp));
  pass_rows(h, m, 0);
}

void set_basis(Highs& h, const LpModel& m, const LpBasis& b) {
  HighsBasis hb;
  hb.valid = true;
  hb.col_status.resize(m.num_cols());
  hb.row_status.resize(m.num_rows());
  for (int j = 0; j < m.num_cols(); ++j) hb.col_status[j] = to_highs(b.col[j]);
  for (int r = 0; r < m.num_rows(); ++r)
    hb.row_status[r] = r < static_cast<int>(b.row.size()) ? to_highs(b.row[r]) : HighsBasisStatus::kBasic;
  h.setBasis(hb);
}

LpSolution collect(Highs& h, const LpModel& m, int64_t iterations_before) {
  LpSolution sol;
  sol.backend = "highs";
  switch (h.getModelStatus()) {
    case HighsModelStatus::kOptimal: sol.status = LpStatus::kOptimal; break;
    case HighsModelStatus::kInfeasible: sol.status = LpStatus::kInfeasible; break;
    case HighsModelStatus::kUnbounded: sol.status = LpStatus::kUnbounded; break;
    case HighsModelStatus::kUnboundedOrInfeasible: sol.status = LpStatus::kInfeasible; break;
    case HighsModelStatus::kIterationLimit:
    case HighsModelStatus::kTimeLimit: sol.status = LpStatus::kIterationLimit; break;
    default: sol.status = LpStatus::kNumericalError; break;
  }
  const HighsSolution& s = h.getSolution();
  sol.iterations = h.getInfo().simplex_iteration_count - iterations_before;
  if (s.value_valid) {
    sol.x.assign(s.col_value.begin(), s.col_value.end());
    sol.row_activity.assign(s.row_value.begin(), s.row_value.end());
  } else {
    sol.x.assign(m.num_cols(), 0.0);
    sol.row_activity.assign(m.num_rows(), 0.0);
  }
  if (s.dual_valid) {
    sol.row_dual.assign(s.row_dual.begin(), s.row_dual.end());
    sol.reduced_cost.assign(s.col_dual.begin(), s.col_dual.end());
  } else {
    sol.row_dual.assign(m.num_rows(), 0.0);
    sol.reduced_cost.assign(m.num_cols(), 0.0);
  }
  sol.objective = 0;
  for (int j = 0; j < m.num_cols(); ++j) sol.objective += m.cost(j) * sol.x[j];
  const HighsBasis& b = h.getBasis();
  if (b.valid) {
    sol.basis.col.reserve(b.col_status.size());
    for (auto st : b.col_status) sol.basis.col.push_back(from_highs(st));
    for (auto st : b.row_status) sol.basis.row.push_back(from_highs(st));
  }
  return sol;
}

}  // namespace

bool highs_available() { return true; }

LpSolution solve_highs(const LpModel& model, const LpBasis* warm, const LpOptions& options) {
  Highs h;
  configure(h, options);
  pass_model(h, model);
  std::string message;
  if (warm && !warm->empty()) {
    if (static_cast<int>(warm->col.size()) == model.num_cols() &&
        static_cast<int>(warm->row.size()) <= model.num_rows())
      set_basis(h, model, *warm);
    else
      message = "warning: incompatible warm basis, cold start";
  }
  h.run();
  LpSolution sol = collect(h, model, 0);
  sol.message = message;
  return sol;
}

struct IncrementalLp::HighsState {
  Highs highs;
  int rows_synced = 0;
};

LpFileSummary read_lp_file_with_highs(const std::string& path) {
  Highs h;
  h.setOptionValue("output_flag", false);
  LpFileSummary out;
  if (h.readModel(path) == HighsStatus::kError) throw std::runtime_error("HiGHS could not read " + path);
  out.num_cols = h.getLp().num_col_;
  out.num_rows = h.getLp().num_row_;
  h.run();
  out.status = h.getModelStatus() == HighsModelStatus::kOptimal ? LpStatus::kOptimal : LpStatus::kNumericalError;
  out.objective = h.getInfo().objective_function_value;
  return out;
}

#else

bool highs_available() { return false; }

LpSolution solve_highs(const LpModel&, const LpBasis*, const LpOptions&) {
  throw std::runtime_error("built without the HiGHS backend");
}

struct IncrementalLp::HighsState {};

LpFileSummary read_lp_file_with_highs(const std::string&) {
  throw std::runtime_error("built without the HiGHS backend");
}

#endif

IncrementalLp::IncrementalLp(const LpModel& model, LpOptions options) : model_(model), options_(std::move(options)) {
  if (options_.backend == LpBackend::kAuto) options_.backend = backend_from_env(LpBackend::kAuto);
}

IncrementalLp::~IncrementalLp() = default;

LpSolution IncrementalLp::solve() {
  LpBackend b = options_.backend;
  if (b == LpBackend::kAuto)
    b = (model_.num_rows() <= options_.builtin_row_limit || !highs_available()) ? LpBackend::kBuiltin
                                                                                 : LpBackend::kHighs;
  LpSolution sol;
#ifdef JOMATCH_HAVE_HIGHS
  if (b == LpBackend::kHighs) {
    if (!highs_) {
      highs_ = std::make_unique<HighsState>();
      configure(highs_->highs, options_);
      pass_model(highs_->highs, model_);
      highs_->rows_synced = model_.num_rows();
      if (!basis_.empty()) set_basis(highs_->highs, model_, basis_);
    } else {
      pass_rows(highs_->highs, model_, highs_->rows_synced);
      highs_->rows_synced = model_.num_rows();
    }
    int64_t before = highs_->highs.getInfo().simplex_iteration_count;
    if (before < 0) before = 0;
    highs_->highs.run();
    sol = collect(highs_->highs, model_, before);
    basis_ = sol.basis;
    return sol;
  }
#endif
  if (b == LpBackend::kExportOnly)
    sol = jomatch::solve(model_, options_);
  else
    sol = solve_builtin(model_, basis_.empty() ? nullptr : &basis_, options_);
  if (!sol.basis.empty()) basis_ = sol.basis;
  return sol;
}

}  // namespace jomatch
