#include "jomatch/relaxation.hpp"

#include <algorithm>

namespace jomatch {

const char* to_string(Formulation f) { return f == Formulation::kPermutation ? "permutation" : "partial"; }

Formulation default_formulation(const Instance& inst) {
  return inst.permutation_shaped() ? Formulation::kPermutation : Formulation::kPartial;
}

VarIndex var_index(const ObjectConfig& c, int64_t column) {
  int lo = 0, hi = c.num_pairs() - 1;
  while (lo < hi) {
    int mid = (lo + hi + 1) / 2;
    if (c.offset(mid) <= column) lo = mid;
    else hi = mid - 1;
  }
  auto [i, j] = c.pair_at(lo);
  int64_t r = column - c.offset(lo);
  return {i, j, static_cast<int>(r / c.size(j)), static_cast<int>(r % c.size(j))};
}

namespace {

int64_t choose(int64_t n, int r) {
  if (n < r) return 0;
  int64_t v = 1;
  for (int a = 0; a < r; ++a) v = v * (n - a) / (a + 1);
  return v;
}

int64_t triple_index(int i, int j, int k, int n) {
  return choose(n, 3) - choose(n - i, 3) + choose(n - i - 1, 2) - choose(n - j, 2) + (k - j - 1);
}

int64_t triangle_id_space(const ObjectConfig& c) {
  int64_t m = c.max_size();
  return choose(c.n(), 3) * m * m * m * 3;
}

}  // namespace

int64_t triangle_row_count(const ObjectConfig& c) {
  int64_t total = 0;
  for (int i = 0; i < c.n(); ++i)
    for (int j = i + 1; j < c.n(); ++j) {
      int64_t dij = static_cast<int64_t>(c.size(i)) * c.size(j);
      for (int k = j + 1; k < c.n(); ++k) total += 3 * dij * c.size(k);
    }
  return total;
}

int64_t triangle_row_id(const ObjectConfig& c, const TriangleRow& r) {
  int64_t m = c.max_size();
  return ((triple_index(r.i, r.j, r.k, c.n()) * m + r.l) * m + r.t) * m * 3 + r.q * 3 + r.kind;
}

LinearForm triangle_form(const ObjectConfig& c, const TriangleRow& r) {
  static const int sign[3][3] = {{-1, 1, 1}, {1, -1, 1}, {1, 1, -1}};
  LinearForm f;
  f.var = {c.var(r.i, r.j, r.l, r.t), c.var(r.j, r.k, r.t, r.q), c.var(r.i, r.k, r.l, r.q)};
  f.coef = {sign[r.kind][0], sign[r.kind][1], sign[r.kind][2]};
  f.sense = RowSense::kLe;
  f.rhs = 1;
  return f;
}

TriangleRow triangle_of(const ConsistencyCut& cut) {
  const Triple& tr = cut.triple;
  int a = cut.d1.front(), b = cut.d2.front();
  switch (cut.orientation) {
    case Orientation::kPivotInK: return {tr.i, tr.j, tr.k, a, b, cut.pivot, 0};
    case Orientation::kPivotInI: return {tr.i, tr.j, tr.k, cut.pivot, a, b, 1};
    case Orientation::kPivotInJ: return {tr.i, tr.j, tr.k, a, cut.pivot, b, 2};
  }
  return {};
}

namespace {

void add_form(LpModel& m, const LinearForm& f) {
  std::vector<int> idx(f.var.begin(), f.var.end());
  std::vector<double> val(f.coef.begin(), f.coef.end());
  m.add_row(idx, val, f.sense, f.rhs);
}

void add_triangle(Relaxation& r, const TriangleRow& row) {
  int64_t id = triangle_row_id(r.config, row);
  if (r.triangle_present[id]) return;
  r.triangle_present[id] = true;
  add_form(r.model, triangle_form(r.config, row));
}

}  // namespace

Relaxation build_relaxation(const Instance& inst, const RelaxationOptions& options) {
  Relaxation r;
  r.config = inst.config;
  r.formulation = options.auto_formulation ? default_formulation(inst) : options.formulation;
  if (r.formulation == Formulation::kPermutation && !inst.config.uniform_size())
    throw ConfigError("the permutation formulation needs equal object sizes");
  const ObjectConfig& c = r.config;
  CostTensor cost(inst);
  std::vector<double> obj = cost.flatten();
  for (int64_t v = 0; v < c.num_vars(); ++v) r.model.add_column(0, kInf, obj[v]);

  const RowSense sense = r.formulation == Formulation::kPermutation ? RowSense::kEq : RowSense::kLe;
  for (int p = 0; p < c.num_pairs(); ++p) {
    auto [i, j] = c.pair_at(p);
    const int di = c.size(i), dj = c.size(j);
    for (int t = 0; t < di; ++t) {
      std::vector<int> idx;
      for (int q = 0; q < dj; ++q) idx.push_back(static_cast<int>(c.var(i, j, t, q)));
      r.model.add_row(idx, std::vector<double>(dj, 1.0), sense, 1.0);
    }
    for (int q = 0; q < dj; ++q) {
      std::vector<int> idx;
      for (int t = 0; t < di; ++t) idx.push_back(static_cast<int>(c.var(i, j, t, q)));
      r.model.add_row(idx, std::vector<double>(di, 1.0), sense, 1.0);
    }
  }
  r.base_rows = r.model.num_rows();
  r.triangle_present.assign(static_cast<size_t>(triangle_id_space(c)), false);
  r.lazy = options.force_lazy || triangle_row_count(c) > options.triangle_cap;
  r.lazy_round_limit = options.lazy_round_limit;
  if (!r.lazy) {
    const int n = c.n();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = j + 1; k < n; ++k)
          for (int l = 0; l < c.size(i); ++l)
            for (int t = 0; t < c.size(j); ++t)
              for (int q = 0; q < c.size(k); ++q)
                for (int kind = 0; kind < 3; ++kind) add_triangle(r, {i, j, k, l, t, q, kind});
  }
  return r;
}

int64_t Relaxation::add_violated_triangles(const std::vector<double>& x, double tol) {
  const ObjectConfig& c = config;
  const int n = c.n();
  std::vector<std::pair<double, TriangleRow>> found;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        for (int l = 0; l < c.size(i); ++l)
          for (int t = 0; t < c.size(j); ++t)
            for (int q = 0; q < c.size(k); ++q) {
              double a = x[c.var(i, j, l, t)], b = x[c.var(j, k, t, q)], e = x[c.var(i, k, l, q)];
              double lhs[3] = {-a + b + e, a - b + e, a + b - e};
              for (int kind = 0; kind < 3; ++kind)
                if (lhs[kind] > 1 + tol) {
                  TriangleRow row{i, j, k, l, t, q, kind};
                  if (!triangle_present[triangle_row_id(c, row)]) found.push_back({lhs[kind] - 1, row});
                }
            }
  if (lazy_round_limit > 0 && static_cast<int64_t>(found.size()) > lazy_round_limit) {
    // Stable, so ties keep enumeration order.
    std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    found.resize(static_cast<size_t>(lazy_round_limit));
  }
  for (const auto& [viol, row] : found) {
    triangle_present[triangle_row_id(c, row)] = true;
    add_form(model, triangle_form(c, row));
  }
  return static_cast<int64_t>(found.size());
}

int64_t Relaxation::triangle_rows() const { return std::count(triangle_present.begin(), triangle_present.end(), true); }

LpModel build_perm_sync_lp(const Instance& inst) {
  if (!inst.config.uniform_size()) throw ConfigError("permutation synchronization needs equal object sizes");
  RelaxationOptions o;
  o.auto_formulation = false;
  o.formulation = Formulation::kPermutation;
  o.triangle_cap = INT64_MAX;
  return build_relaxation(inst, o).model;
}

LpModel build_jom_basic_lp(const Instance& inst) {
  RelaxationOptions o;
  o.auto_formulation = false;
  o.formulation = Formulation::kPartial;
  o.triangle_cap = INT64_MAX;
  return build_relaxation(inst, o).model;
}

int attach_cuts(Relaxation& relax, const std::vector<Cut>& cuts) {
  int added = 0;
  for (const Cut& cut : cuts) {
    validate_cut(cut, relax.config);
    const ConsistencyCut* cc = std::get_if<ConsistencyCut>(&cut);
    ConsistencyCut from_block;
    if (auto* b = std::get_if<BlockCut>(&cut); b && b->d3.size() == 1) {
      from_block = {b->triple, b->orientation, b->d3[0], b->d1, b->d2};
      cc = &from_block;
    }
    if (cc && cc->d1.size() == 1 && cc->d2.size() == 1) {
      TriangleRow row = triangle_of(*cc);
      int64_t id = triangle_row_id(relax.config, row);
      if (relax.triangle_present[id]) continue;
      relax.triangle_present[id] = true;
      add_form(relax.model, triangle_form(relax.config, row));
      ++added;
      continue;
    }
    if (!relax.cut_keys.insert(canonical_key(cut)).second) continue;
    add_form(relax.model, linear_form(cut, relax.config));
    ++added;
  }
  return added;
}

LpModel attach_cuts(const LpModel& model, const ObjectConfig& config, const std::vector<Cut>& cuts) {
  LpModel out = model;
  std::set<std::string> keys;
  for (const Cut& cut : cuts) {
    validate_cut(cut, config);
    if (!keys.insert(canonical_key(cut)).second) continue;
    add_form(out, linear_form(cut, config));
  }
  return out;
}

}  // namespace jomatch
