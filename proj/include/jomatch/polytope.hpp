#pragma once

#include "jomatch/cuts.hpp"
#include "jomatch/instance.hpp"
#include "jomatch/lp.hpp"
#include "jomatch/relaxation.hpp"

#include <string>
#include <vector>

namespace jomatch {

// Vertices of the joint matching polytope as 0/1 vectors in the column
// layout of ObjectConfig, with their canonical labelings.
struct VertexSet {
  ObjectConfig config;
  std::vector<std::vector<int>> points;
  std::vector<UniverseLabeling> labelings;
  size_t size() const { return points.size(); }
};

constexpr int kEnumerationLimit = 12;
constexpr int kOracleLimit = 10;

// Labels matched groups 1, 2, ... in order of first occurrence; singletons get 0.
UniverseLabeling canonical_labeling(const ObjectConfig& config, const std::vector<std::vector<int>>& group);
UniverseLabeling labeling_from_maps(const BinaryMaps& s);

// Recursion over set partitions whose blocks hold at most one element per object.
VertexSet enumerate_vertices(const ObjectConfig& config);
// Backtracking over partial-map blocks filtered by the triangle rows; an
// independent route to the same set (sorted lexicographically).
VertexSet enumerate_vertices_by_filter(const ObjectConfig& config);
void sort_points(VertexSet& v);

// Affine rank of a point set, by fraction-free integer elimination.
int affine_rank(const std::vector<std::vector<int>>& points);
int dimension(const ObjectConfig& config);
int dimension(const VertexSet& vertices);

struct FacetCheck {
  bool valid = true;
  int tight_count = 0;
  int tight_rank = -1;
  bool is_facet = false;
  int violating_vertex = -1;
};
FacetCheck verify_facet(const LinearForm& f, const VertexSet& vertices, int dim);
FacetCheck verify_facet(const LinearForm& f, const ObjectConfig& config);

struct NamedInequality {
  std::string name;
  LinearForm form;
  int m_hat = 0;  // size inequalities only
};
// Families: nonneg, rowsum (row and column sums), consistency, block, size.
std::vector<NamedInequality> inequality_family(const ObjectConfig& config, const std::string& family);
int64_t form_value(const LinearForm& f, const std::vector<int>& point);

struct HullResult {
  bool inside = false;
  double residual = 0;             // total deviation of the best combination
  std::vector<double> weights;     // convex weights when inside
  std::vector<double> normal;      // separating a.x <= b when outside
  double rhs = 0;                  // max over vertices of a.v
  double point_value = 0;          // a.x
};
HullResult hull_membership(const std::vector<double>& point, const VertexSet& vertices, const LpOptions& options = {});
HullResult hull_membership(const RealMaps& point, const LpOptions& options = {});

struct OracleResult {
  int64_t optimum = 0;
  std::vector<BinaryMaps> argmin;
  bool unique() const { return argmin.size() == 1; }
};
// Brute-force minimum of the linear objective over the vertices feasible for
// the formulation: all vertices for kPartial, those whose blocks are
// permutation matrices for kPermutation. The one-argument form uses
// default_formulation(inst), matching the relaxation solve_basic builds.
OracleResult ilp_oracle(const Instance& inst, Formulation formulation);
OracleResult ilp_oracle(const Instance& inst);

}  // namespace jomatch
