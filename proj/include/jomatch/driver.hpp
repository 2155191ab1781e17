#pragma once

#include "jomatch/cuts.hpp"
#include "jomatch/instance.hpp"
#include "jomatch/lp.hpp"
#include "jomatch/relaxation.hpp"

#include <optional>
#include <string>
#include <vector>

namespace jomatch {

constexpr double kBinTol = 1e-4;
constexpr double kProbeEps = 1e-5;

struct SolveOptions {
  LpOptions lp;
  RelaxationOptions relaxation;
  int cut_limit = 1000;  // cuts added by the double LP
  SeparationStrategy strategy = SeparationStrategy::kFirstK;
  int max_rounds = 50;  // cutting-plane rounds
  int per_round_limit = 1000;
  int threads = 1;
  bool uniqueness_probe = false;
};

enum class SolveStatus { kOptimal, kRoundLimit, kSolverFailure };
const char* to_string(SolveStatus s);

struct SolveReport {
  std::string method;
  SolveStatus status = SolveStatus::kSolverFailure;
  LpSolution lp;
  RealMaps maps;
  double objective = 0;
  bool is_binary = false;
  bool is_consistent = false;
  bool recovered = false;
  // Heuristic perturbation probe; empty when not run.
  std::optional<bool> unique;
  int cuts_added = 0;
  int rounds = 0;
  int64_t lp_rows = 0;
  int64_t lazy_rounds = 0;
  std::vector<double> round_objectives;
  double wall_ms = 0;
  std::string formulation;
};

SolveReport solve_basic(const Instance& inst, const SolveOptions& options = {});
SolveReport double_lp(const Instance& inst, const SolveOptions& options = {});
SolveReport cutting_plane_lpf(const Instance& inst, const SolveOptions& options = {});
SolveReport solve_method(const std::string& method, const Instance& inst, const SolveOptions& options = {});

bool is_binary(const RealMaps& s, double tol = kBinTol);
// Entrywise rounding to the nearest integer.
BinaryMaps round_entries(const RealMaps& s);

struct RoundingResult {
  BinaryMaps maps;
  bool consistent = false;
  ConsistencyWitness witness;
};
// Per-block maximum-weight assignment keeping assigned entries above kBinTol,
// followed by a consistency check. Inconsistent results are reported as is.
RoundingResult round_solution(const RealMaps& s);

struct ResultRow {
  int n = 0, d = 0;
  double p_true = 0, p_obs = 0;
  uint64_t seed = 0;
  std::string method;
  double objective = 0;
  bool is_binary = false, recovered = false;
  int cuts_added = 0, rounds = 0;
  double wall_ms = 0;
};
std::string results_csv_header();
std::string results_csv_line(const ResultRow& r, bool include_time = true);

}  // namespace jomatch
