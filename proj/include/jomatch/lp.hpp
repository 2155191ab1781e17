#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace jomatch {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-7;
constexpr double kCsTol = 1e-6;
constexpr double kGapTol = 1e-7;

enum class RowSense { kLe, kEq, kGe };

// Minimisation LP with bounded columns and sparse rows (row-major storage).
class LpModel {
 public:
  int add_column(double lower, double upper, double cost, std::string name = {});
  int add_row(const std::vector<int>& index, const std::vector<double>& value, RowSense sense, double rhs,
              std::string name = {});

  int num_cols() const { return static_cast<int>(cost_.size()); }
  int num_rows() const { return static_cast<int>(rhs_.size()); }
  int64_t num_nonzeros() const { return row_start_.back(); }

  double lower(int j) const { return lower_[j]; }
  double upper(int j) const { return upper_[j]; }
  double cost(int j) const { return cost_[j]; }
  void set_cost(int j, double c) { cost_[j] = c; }
  void set_bounds(int j, double lo, double up) {
    lower_[j] = lo;
    upper_[j] = up;
  }
  RowSense sense(int r) const { return sense_[r]; }
  double rhs(int r) const { return rhs_[r]; }
  int64_t row_begin(int r) const { return row_start_[r]; }
  int64_t row_end(int r) const { return row_start_[r + 1]; }
  int index(int64_t k) const { return index_[k]; }
  double value(int64_t k) const { return value_[k]; }
  const std::string& col_name(int j) const { return col_names_[j]; }
  const std::string& row_name(int r) const { return row_names_[r]; }

  double row_activity(int r, const std::vector<double>& x) const;
  // Throws std::invalid_argument on duplicates, bad indices or non-finite data.
  void validate() const;
  // Byte-level identity of two models.
  bool operator==(const LpModel& o) const;

 private:
  std::vector<double> lower_, upper_, cost_;
  std::vector<std::string> col_names_, row_names_;
  std::vector<int64_t> row_start_{0};
  std::vector<int> index_;
  std::vector<double> value_;
  std::vector<RowSense> sense_;
  std::vector<double> rhs_;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit, kNumericalError, kNotSolved };
const char* to_string(LpStatus s);

enum class VarStatus : signed char { kLower, kUpper, kBasic, kFree };

// Statuses of columns and of row activities; rows appended after the basis
// was taken are treated as basic.
struct LpBasis {
  std::vector<VarStatus> col;
  std::vector<VarStatus> row;
  bool empty() const { return col.empty() && row.empty(); }
};

struct LpSolution {
  LpStatus status = LpStatus::kNotSolved;
  std::vector<double> x;
  std::vector<double> row_activity;
  // Row duals y with c - A^T y = reduced costs; y <= 0 on active <= rows.
  std::vector<double> row_dual;
  std::vector<double> reduced_cost;
  double objective = 0;
  int64_t iterations = 0;
  LpBasis basis;
  std::string backend;
  std::string message;
  bool optimal() const { return status == LpStatus::kOptimal; }
};

enum class LpBackend { kAuto, kBuiltin, kHighs, kExportOnly };

struct LpOptions {
  LpBackend backend = LpBackend::kAuto;
  int64_t max_iterations = -1;  // -1: backend default
  double time_limit = kInf;
  std::string export_path;  // used by kExportOnly
  // kAuto picks the builtin backend while the row count stays below this.
  int builtin_row_limit = 600;
};

// Backend selection from JOMATCH_LP_BACKEND, falling back to `fallback`.
LpBackend backend_from_env(LpBackend fallback = LpBackend::kAuto);
bool highs_available();

LpSolution solve(const LpModel& model, const LpOptions& options = {});
LpSolution solve_with_basis(const LpModel& model, const LpBasis& warm, const LpOptions& options = {});

LpSolution solve_builtin(const LpModel& model, const LpBasis* warm, const LpOptions& options);
LpSolution solve_highs(const LpModel& model, const LpBasis* warm, const LpOptions& options);

// Re-solves a model that only grows by appended rows, warm-starting each time.
// With HiGHS the solver instance and its factorisation are kept between calls.
class IncrementalLp {
 public:
  IncrementalLp(const LpModel& model, LpOptions options);
  ~IncrementalLp();
  IncrementalLp(const IncrementalLp&) = delete;
  IncrementalLp& operator=(const IncrementalLp&) = delete;
  LpSolution solve();
  const LpBasis& basis() const { return basis_; }

 private:
  struct HighsState;
  const LpModel& model_;
  LpOptions options_;
  LpBasis basis_;
  std::unique_ptr<HighsState> highs_;
};

void export_lp_file(const LpModel& model, const std::string& path);
std::string lp_file_text(const LpModel& model);

// Reads an LP-format file with HiGHS and solves it; used to check exports.
struct LpFileSummary {
  int num_cols = 0;
  int num_rows = 0;
  LpStatus status = LpStatus::kNotSolved;
  double objective = 0;
};
LpFileSummary read_lp_file_with_highs(const std::string& path);

struct LpResiduals {
  double primal_infeasibility = 0;
  double dual_infeasibility = 0;
  double complementarity = 0;
  double primal_objective = 0;
  double dual_objective = 0;
  double gap = 0;
  bool within_tolerances() const;
};
// Residuals recomputed from the model; independent of the backend.
LpResiduals check_solution(const LpModel& model, const LpSolution& sol);

}  // namespace jomatch
