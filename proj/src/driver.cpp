#include "jomatch/driver.hpp"

#include "jomatch/assignment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

namespace jomatch {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kRoundLimit: return "round-limit";
    case SolveStatus::kSolverFailure: return "solver-failure";
  }
  return "?";
}

bool is_binary(const RealMaps& s, double tol) {
  for (int p = 0; p < s.config().num_pairs(); ++p) {
    const auto& b = s.block_at(p);
    if (((b.array() - b.array().round()).abs() > tol).any()) return false;
  }
  return true;
}

BinaryMaps round_entries(const RealMaps& s) {
  BinaryMaps out(s.config());
  for (int p = 0; p < s.config().num_pairs(); ++p) out.block_at(p) = s.block_at(p).array().round().cast<int>();
  return out;
}

RoundingResult round_solution(const RealMaps& s) {
  RoundingResult res;
  res.maps = BinaryMaps(s.config());
  for (int p = 0; p < s.config().num_pairs(); ++p) {
    const BlockMatrix& b = s.block_at(p);
    auto assign = max_weight_assignment(b);
    auto& out = res.maps.block_at(p);
    for (int t = 0; t < static_cast<int>(assign.size()); ++t)
      if (assign[t] >= 0 && b(t, assign[t]) > kBinTol) out(t, assign[t]) = 1;
  }
  auto check = check_cycle_consistency(res.maps);
  res.consistent = check.ok;
  res.witness = check.witness;
  return res;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Solves the current model, adding violated triangle rows until none remain
// when the relaxation is lazy.
LpSolution solve_to_fixpoint(Relaxation& relax, IncrementalLp& lp, int64_t& lazy_rounds) {
  for (;;) {
    LpSolution sol = lp.solve();
    if (!sol.optimal() || !relax.lazy) return sol;
    if (relax.add_violated_triangles(sol.x) == 0) return sol;
    ++lazy_rounds;
  }
}

void classify(const Instance& inst, SolveReport& rep) {
  rep.maps = RealMaps::from_flat(inst.config, rep.lp.x);
  rep.objective = rep.lp.objective;
  rep.is_binary = is_binary(rep.maps);
  if (rep.is_binary) {
    BinaryMaps rounded = round_entries(rep.maps);
    rep.is_consistent = check_cycle_consistency(rounded).ok;
    if (inst.ground_truth) rep.recovered = rounded == maps_from_labeling(inst.config, *inst.ground_truth);
  }
}

struct Pipeline {
  const Instance& inst;
  const SolveOptions& options;
  Relaxation relax;
  IncrementalLp lp;
  SolveReport rep;
  Clock::time_point start = Clock::now();

  Pipeline(const Instance& in, const SolveOptions& o, const std::string& method)
      : inst(in), options(o), relax(build_relaxation(in, o.relaxation)), lp(relax.model, o.lp) {
    rep.method = method;
    rep.formulation = to_string(relax.formulation);
  }

  bool step() {
    rep.lp = solve_to_fixpoint(relax, lp, rep.lazy_rounds);
    ++rep.rounds;
    if (!rep.lp.optimal()) {
      rep.status = SolveStatus::kSolverFailure;
      return false;
    }
    rep.round_objectives.push_back(rep.lp.objective);
    classify(inst, rep);
    return true;
  }

  int add_cuts(int limit) {
    SeparateOptions so;
    so.limit = limit;
    so.strategy = options.strategy;
    so.threads = options.threads;
    auto cuts = separate_all(rep.maps, so);
    std::vector<Cut> pool(cuts.begin(), cuts.end());
    int added = attach_cuts(relax, pool);
    rep.cuts_added += added;
    return added;
  }

  SolveReport finish() {
    if (rep.status != SolveStatus::kSolverFailure && options.uniqueness_probe && rep.recovered) probe();
    rep.lp_rows = relax.model.num_rows();
    rep.wall_ms = elapsed_ms(start);
    return std::move(rep);
  }

  void probe() {
    Relaxation copy = relax;
    BinaryMaps truth = maps_from_labeling(inst.config, *inst.ground_truth);
    auto flat = truth.flatten();
    for (int64_t v = 0; v < copy.config.num_vars(); ++v)
      if (flat[v]) copy.model.set_cost(static_cast<int>(v), copy.model.cost(static_cast<int>(v)) + kProbeEps);
    IncrementalLp probe_lp(copy.model, options.lp);
    int64_t rounds = 0;
    LpSolution sol = solve_to_fixpoint(copy, probe_lp, rounds);
    if (!sol.optimal()) return;
    RealMaps moved = RealMaps::from_flat(inst.config, sol.x);
    rep.unique = is_binary(moved) && round_entries(moved) == truth;
  }
};

}  // namespace

SolveReport solve_basic(const Instance& inst, const SolveOptions& options) {
  Pipeline pipe(inst, options, "basic");
  if (pipe.step()) pipe.rep.status = SolveStatus::kOptimal;
  return pipe.finish();
}

SolveReport double_lp(const Instance& inst, const SolveOptions& options) {
  Pipeline pipe(inst, options, "double");
  if (!pipe.step()) return pipe.finish();
  pipe.rep.status = SolveStatus::kOptimal;
  if (pipe.rep.is_binary) return pipe.finish();
  if (pipe.add_cuts(options.cut_limit) > 0 && !pipe.step()) return pipe.finish();
  return pipe.finish();
}

SolveReport cutting_plane_lpf(const Instance& inst, const SolveOptions& options) {
  Pipeline pipe(inst, options, "lpf");
  if (!pipe.step()) return pipe.finish();
  pipe.rep.status = SolveStatus::kRoundLimit;
  for (;;) {
    if (pipe.add_cuts(options.per_round_limit) == 0) {
      pipe.rep.status = SolveStatus::kOptimal;
      break;
    }
    if (pipe.rep.rounds >= options.max_rounds) break;
    if (!pipe.step()) break;
  }
  return pipe.finish();
}

SolveReport solve_method(const std::string& method, const Instance& inst, const SolveOptions& options) {
  if (method == "basic") return solve_basic(inst, options);
  if (method == "double") return double_lp(inst, options);
  if (method == "lpf") return cutting_plane_lpf(inst, options);
  throw ConfigError("unknown method '" + method + "' (expected basic, double or lpf)");
}

std::string results_csv_header() { return "n,d,p_true,p_obs,seed,method,objective,is_binary,recovered,cuts_added,rounds,wall_ms"; }

std::string results_csv_line(const ResultRow& r, bool include_time) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%d,%d,%.4f,%.4f,%llu,%s,%.9g,%d,%d,%d,%d,", r.n, r.d, r.p_true, r.p_obs,
                static_cast<unsigned long long>(r.seed), r.method.c_str(), r.objective, r.is_binary ? 1 : 0,
                r.recovered ? 1 : 0, r.cuts_added, r.rounds);
  std::string line = buf;
  if (include_time) {
    std::snprintf(buf, sizeof buf, "%.1f", r.wall_ms);
    line += buf;
  }
  return line;
}

}  // namespace jomatch
