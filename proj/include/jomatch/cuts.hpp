#pragma once

#include "jomatch/instance.hpp"
#include "jomatch/lp.hpp"

#include <string>
#include <variant>
#include <vector>

namespace jomatch {

constexpr double kViolTol = 1e-6;

// Which object of the triple i<j<k holds the pivot element. The minus block
// lies between the two other objects:
//   kPivotInK: l in [d_k], D1 in [d_i], D2 in [d_j], minus block X(i,j)
//   kPivotInI: l in [d_i], D1 in [d_j], D2 in [d_k], minus block X(j,k)
//   kPivotInJ: l in [d_j], D1 in [d_i], D2 in [d_k], minus block X(i,k)
enum class Orientation { kPivotInK = 0, kPivotInI = 1, kPivotInJ = 2 };
const char* to_string(Orientation o);
Orientation orientation_from_string(const std::string& s);

struct Triple {
  int i = 0, j = 1, k = 2;
  bool operator==(const Triple&) const = default;
};

struct ConsistencyCut {
  Triple triple;
  Orientation orientation = Orientation::kPivotInK;
  int pivot = 0;
  std::vector<int> d1, d2;  // sorted element indices, 0-based
  bool operator==(const ConsistencyCut&) const = default;
};

struct BlockCut {
  Triple triple;
  Orientation orientation = Orientation::kPivotInK;
  std::vector<int> d1, d2, d3;
  bool facet_grade() const { return d1.size() + d2.size() > d3.size(); }
  bool operator==(const BlockCut&) const = default;
};

// Sum of X over pairs of elements of N' from different objects is >= 1.
struct SizeCut {
  std::vector<int> elements;  // global element ids, sorted
  int m_hat = 0;
  bool operator==(const SizeCut&) const = default;
};

using Cut = std::variant<ConsistencyCut, BlockCut, SizeCut>;

// Sparse integer form of a cut over the variable layout of ObjectConfig.
struct LinearForm {
  std::vector<int64_t> var;
  std::vector<int> coef;
  RowSense sense = RowSense::kLe;
  int rhs = 0;
};

// The three object indices holding (pivot, D1, D2) for an orientation.
struct Roles {
  int pivot, first, second;
};
Roles roles(const Triple& tr, Orientation o);

BlockCut as_block_cut(const ConsistencyCut& c);
LinearForm linear_form(const Cut& cut, const ObjectConfig& config);
LinearForm linear_form(const ConsistencyCut& cut, const ObjectConfig& config);
int rhs(const Cut& cut);
// Throws std::out_of_range for bad indices and std::invalid_argument for empty subsets.
void validate_cut(const Cut& cut, const ObjectConfig& config);
std::string canonical_key(const Cut& cut);

template <typename Scalar>
Scalar evaluate(const LinearForm& f, const SolutionMaps<Scalar>& s) {
  const ObjectConfig& c = s.config();
  Scalar lhs(0);
  for (size_t e = 0; e < f.var.size(); ++e) {
    int64_t v = f.var[e];
    int p = 0;
    int lo = 0, hi = c.num_pairs() - 1;
    while (lo < hi) {
      int mid = (lo + hi + 1) / 2;
      if (c.offset(mid) <= v) lo = mid;
      else hi = mid - 1;
    }
    p = lo;
    const auto& b = s.block_at(p);
    int64_t r = v - c.offset(p);
    lhs += Scalar(f.coef[e]) * b(static_cast<Eigen::Index>(r / b.cols()), static_cast<Eigen::Index>(r % b.cols()));
  }
  return lhs;
}

template <typename Scalar>
Scalar evaluate(const Cut& cut, const SolutionMaps<Scalar>& s) {
  return evaluate(linear_form(cut, s.config()), s);
}

template <typename Scalar>
bool violated(const Cut& cut, const SolutionMaps<Scalar>& s, double tol = kViolTol) {
  LinearForm f = linear_form(cut, s.config());
  Scalar lhs = evaluate(f, s);
  if (f.sense == RowSense::kGe) return lhs < Scalar(f.rhs) - Scalar(tol);
  return lhs > Scalar(f.rhs) + Scalar(tol);
}

// Exact maximiser of the separation objective for one cell.
struct SeparationResult {
  std::vector<int> d1, d2;  // empty when the optimum uses an empty set
  double value = 0;
  bool violated = false;
  ConsistencyCut cut() const;
  Triple triple;
  Orientation orientation = Orientation::kPivotInK;
  int pivot = 0;
};

// Coefficients of the separation objective u.y + v.z - y^T W z for one cell.
struct SeparationData {
  std::vector<double> u, v;
  BlockMatrix w;
};
SeparationData separation_data(const RealMaps& s, const Triple& tr, Orientation o, int pivot);

SeparationResult separate_consistency(const RealMaps& s, const Triple& tr, Orientation o, int pivot);
// Solves the separation objective by min cut; exposed for cross-checks.
SeparationResult maximize_by_mincut(const SeparationData& data);
// Exhaustive maximisation over all subset pairs (small d only).
SeparationResult maximize_by_enumeration(const SeparationData& data);

struct SeparationLpResult {
  double value = 0;
  std::vector<double> y, z;
  LpStatus status = LpStatus::kNotSolved;
};
SeparationLpResult separate_via_lp(const RealMaps& s, const Triple& tr, Orientation o, int pivot,
                                   const LpOptions& options = {});
SeparationLpResult maximize_by_lp(const SeparationData& data, const LpOptions& options = {});

enum class SeparationStrategy { kFirstK, kTopK };

struct SeparateOptions {
  int limit = 1000;
  SeparationStrategy strategy = SeparationStrategy::kFirstK;
  int threads = 1;
};

// Cells are scanned in lexicographic (i,j,k, orientation, pivot) order.
std::vector<ConsistencyCut> separate_all(const RealMaps& s, const SeparateOptions& options = {});

SizeCut make_size_cut(std::vector<int> elements, int m_hat, const ObjectConfig& config);
// Number of universe elements used by a labeling: matched groups plus singletons.
int universe_size(const UniverseLabeling& lab);
bool size_cut_valid_on(const SizeCut& cut, const BinaryMaps& vertex);

std::string cuts_to_json_text(const std::vector<Cut>& cuts);
std::vector<Cut> cuts_from_json_text(const std::string& text);

}  // namespace jomatch
