#include "jomatch/lp.hpp"

#include <cstdlib>

namespace jomatch {

namespace {

LpBackend resolve(const LpModel& model, const LpOptions& options) {
  LpBackend b = options.backend == LpBackend::kAuto ? backend_from_env(LpBackend::kAuto) : options.backend;
  if (b == LpBackend::kAuto)
    b = (model.num_rows() <= options.builtin_row_limit || !highs_available()) ? LpBackend::kBuiltin
                                                                              : LpBackend::kHighs;
  return b;
}

LpSolution export_only(const LpModel& model, const LpOptions& options) {
  std::string path = options.export_path;
  if (path.empty()) {
    const char* env = std::getenv("JOMATCH_LP_EXPORT");
    path = env && *env ? env : "model.lp";
  }
  export_lp_file(model, path);
  LpSolution sol;
  sol.status = LpStatus::kNotSolved;
  sol.backend = "export-only";
  sol.message = "model written to " + path;
  return sol;
}

LpSolution dispatch(const LpModel& model, const LpBasis* warm, const LpOptions& options) {
  switch (resolve(model, options)) {
    case LpBackend::kExportOnly: return export_only(model, options);
    case LpBackend::kHighs: return solve_highs(model, warm, options);
    default: return solve_builtin(model, warm, options);
  }
}

}  // namespace

LpSolution solve(const LpModel& model, const LpOptions& options) { return dispatch(model, nullptr, options); }

LpSolution solve_with_basis(const LpModel& model, const LpBasis& warm, const LpOptions& options) {
  return dispatch(model, &warm, options);
}

}  // namespace jomatch
