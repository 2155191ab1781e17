#pragma once

#include "jomatch/cuts.hpp"
#include "jomatch/instance.hpp"
#include "jomatch/lp.hpp"

#include <set>
#include <string>
#include <vector>

namespace jomatch {

// kPermutation: row and column sums equal one. kPartial: sums at most one.
enum class Formulation { kPermutation, kPartial };
const char* to_string(Formulation f);

// Permutation form whenever sizes are equal and every observed block is a
// permutation matrix; the partial form otherwise.
Formulation default_formulation(const Instance& inst);

struct VarIndex {
  int i = 0, j = 1, t = 0, q = 0;
  bool operator==(const VarIndex&) const = default;
};
VarIndex var_index(const ObjectConfig& c, int64_t column);

// One row of the triangle system on X_lt(i,j), X_tq(j,k), X_lq(i,k);
// kind 0,1,2 = signs (-,+,+), (+,-,+), (+,+,-).
struct TriangleRow {
  int i, j, k, l, t, q, kind;
};
int64_t triangle_row_count(const ObjectConfig& c);
int64_t triangle_row_id(const ObjectConfig& c, const TriangleRow& r);
LinearForm triangle_form(const ObjectConfig& c, const TriangleRow& r);
// The triangle row a single-element consistency cut coincides with.
TriangleRow triangle_of(const ConsistencyCut& cut);

struct RelaxationOptions {
  Formulation formulation = Formulation::kPartial;
  bool auto_formulation = true;
  // Triangle rows are generated lazily once their count would exceed this.
  int64_t triangle_cap = 20'000;
  bool force_lazy = false;
  // Most violated triangle rows added per lazy round.
  int64_t lazy_round_limit = 20'000;
};

struct Relaxation {
  ObjectConfig config;
  Formulation formulation = Formulation::kPartial;
  LpModel model;
  bool lazy = false;
  int64_t lazy_round_limit = 20'000;
  int base_rows = 0;
  std::vector<bool> triangle_present;  // by triangle_row_id
  std::set<std::string> cut_keys;

  // Appends the lazy_round_limit most violated triangle rows (beyond tol)
  // not yet present; returns the count added.
  int64_t add_violated_triangles(const std::vector<double>& x, double tol = kViolTol);
  // Row count of the triangle rows present.
  int64_t triangle_rows() const;
};

Relaxation build_relaxation(const Instance& inst, const RelaxationOptions& options = {});
// Problem with equality row/column sums and every triangle row.
LpModel build_perm_sync_lp(const Instance& inst);
// Relaxation with row/column sums at most one and every triangle row.
LpModel build_jom_basic_lp(const Instance& inst);

// One row per new cut; cuts already present (by canonical key, or as a
// triangle row) are skipped. Returns the number of rows added.
int attach_cuts(Relaxation& relax, const std::vector<Cut>& cuts);
LpModel attach_cuts(const LpModel& model, const ObjectConfig& config, const std::vector<Cut>& cuts);

}  // namespace jomatch
