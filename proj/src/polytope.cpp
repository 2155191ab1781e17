#include "jomatch/polytope.hpp"

#include "jomatch/relaxation.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace jomatch {

namespace {

using boost::multiprecision::cpp_int;

void require_small(const ObjectConfig& config, int limit) {
  if (config.n() < 2) throw ConfigError("the polytope needs at least two objects");
  if (config.total_elements() > limit)
    throw ConfigError("total element count " + std::to_string(config.total_elements()) + " exceeds the limit " +
                      std::to_string(limit));
}

std::vector<int> point_of(const ObjectConfig& config, const UniverseLabeling& lab) {
  std::vector<int> v(static_cast<size_t>(config.num_vars()), 0);
  for (int p = 0; p < config.num_pairs(); ++p) {
    auto [i, j] = config.pair_at(p);
    for (int t = 0; t < config.size(i); ++t) {
      int a = lab.labels[i][t];
      if (a == 0) continue;
      for (int q = 0; q < config.size(j); ++q)
        if (lab.labels[j][q] == a) v[config.var(i, j, t, q)] = 1;
    }
  }
  return v;
}

}  // namespace

UniverseLabeling canonical_labeling(const ObjectConfig& config, const std::vector<std::vector<int>>& group) {
  std::vector<std::vector<int>> g = group;
  for (auto& members : g) std::sort(members.begin(), members.end());
  std::sort(g.begin(), g.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  UniverseLabeling lab;
  lab.labels.resize(config.n());
  for (int i = 0; i < config.n(); ++i) lab.labels[i].assign(config.size(i), 0);
  int next = 0;
  for (const auto& members : g) {
    if (members.size() < 2) continue;
    ++next;
    for (int e : members) {
      auto [i, t] = config.element_at(e);
      lab.labels[i][t] = next;
    }
  }
  return lab;
}

UniverseLabeling labeling_from_maps(const BinaryMaps& s) {
  const ObjectConfig& c = s.config();
  std::vector<int> parent(static_cast<size_t>(c.total_elements()));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (int p = 0; p < c.num_pairs(); ++p) {
    auto [i, j] = c.pair_at(p);
    const auto& b = s.block_at(p);
    for (int t = 0; t < c.size(i); ++t)
      for (int q = 0; q < c.size(j); ++q)
        if (b(t, q)) parent[find(c.element(i, t))] = find(c.element(j, q));
  }
  std::vector<std::vector<int>> groups;
  std::vector<int> slot(parent.size(), -1);
  for (int e = 0; e < static_cast<int>(parent.size()); ++e) {
    int r = find(e);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[slot[r]].push_back(e);
  }
  return canonical_labeling(c, groups);
}

void sort_points(VertexSet& v) {
  std::vector<size_t> order(v.points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return v.points[a] < v.points[b]; });
  VertexSet out;
  out.config = v.config;
  for (size_t o : order) {
    out.points.push_back(std::move(v.points[o]));
    out.labelings.push_back(std::move(v.labelings[o]));
  }
  v = std::move(out);
}

VertexSet enumerate_vertices(const ObjectConfig& config) {
  require_small(config, kEnumerationLimit);
  VertexSet out;
  out.config = config;
  const int total = static_cast<int>(config.total_elements());
  std::vector<int> object(total);
  for (int e = 0; e < total; ++e) object[e] = config.element_at(e).first;
  std::vector<std::vector<int>> groups;
  std::vector<uint32_t> masks;
  std::function<void(int)> place = [&](int e) {
    if (e == total) {
      UniverseLabeling lab = canonical_labeling(config, groups);
      out.points.push_back(point_of(config, lab));
      out.labelings.push_back(std::move(lab));
      return;
    }
    const uint32_t bit = 1u << object[e];
    for (size_t g = 0; g < groups.size(); ++g) {
      if (masks[g] & bit) continue;
      groups[g].push_back(e);
      masks[g] |= bit;
      place(e + 1);
      masks[g] &= ~bit;
      groups[g].pop_back();
    }
    groups.push_back({e});
    masks.push_back(bit);
    place(e + 1);
    groups.pop_back();
    masks.pop_back();
  };
  place(0);
  sort_points(out);
  return out;
}

VertexSet enumerate_vertices_by_filter(const ObjectConfig& config) {
  require_small(config, kEnumerationLimit);
  const int n = config.n();
  // All partial-map blocks of each pair's shape.
  std::vector<std::vector<BinaryBlock>> options(config.num_pairs());
  for (int p = 0; p < config.num_pairs(); ++p) {
    auto [i, j] = config.pair_at(p);
    const int r = config.size(i), c = config.size(j);
    for (uint64_t mask = 0; mask < (uint64_t{1} << (r * c)); ++mask) {
      BinaryBlock b(r, c);
      for (int t = 0; t < r; ++t)
        for (int q = 0; q < c; ++q) b(t, q) = (mask >> (t * c + q)) & 1;
      bool ok = true;
      for (int t = 0; t < r && ok; ++t) ok = b.row(t).sum() <= 1;
      for (int q = 0; q < c && ok; ++q) ok = b.col(q).sum() <= 1;
      if (ok) options[p].push_back(std::move(b));
    }
  }
  VertexSet out;
  out.config = config;
  BinaryMaps s(config);
  auto triangles_hold = [&](int i, int j, int k) {
    const auto &a = s.block(i, j), &b = s.block(j, k), &c = s.block(i, k);
    for (int l = 0; l < config.size(i); ++l)
      for (int t = 0; t < config.size(j); ++t)
        for (int q = 0; q < config.size(k); ++q) {
          int x1 = a(l, t), x2 = b(t, q), x3 = c(l, q);
          if (-x1 + x2 + x3 > 1 || x1 - x2 + x3 > 1 || x1 + x2 - x3 > 1) return false;
        }
    return true;
  };
  std::function<void(int)> assign = [&](int p) {
    if (p == config.num_pairs()) {
      out.points.push_back(s.flatten());
      out.labelings.push_back(labeling_from_maps(s));
      return;
    }
    auto [j, k] = config.pair_at(p);
    for (const auto& b : options[p]) {
      s.block_at(p) = b;
      bool ok = true;
      // Pair (j,k) is the last of every triple i<j<k to be assigned.
      for (int i = 0; i < j && ok; ++i) ok = triangles_hold(i, j, k);
      if (ok) assign(p + 1);
    }
    s.block_at(p).setZero();
  };
  (void)n;
  assign(0);
  sort_points(out);
  return out;
}

int affine_rank(const std::vector<std::vector<int>>& points) {
  if (points.empty()) return -1;
  const size_t dim = points.front().size();
  std::vector<std::vector<cpp_int>> basis;  // sorted by pivot column
  std::vector<size_t> pivots;
  for (size_t a = 1; a < points.size() && basis.size() < dim; ++a) {
    std::vector<cpp_int> r(dim);
    bool any = false;
    for (size_t c = 0; c < dim; ++c) {
      r[c] = points[a][c] - points[0][c];
      any = any || r[c] != 0;
    }
    if (!any) continue;
    for (size_t b = 0; b < basis.size(); ++b) {
      const size_t c = pivots[b];
      if (r[c] == 0) continue;
      cpp_int f = r[c], g = basis[b][c];
      cpp_int common = 0;
      for (size_t x = 0; x < dim; ++x) {
        r[x] = g * r[x] - f * basis[b][x];
        if (r[x] != 0) common = common == 0 ? cpp_int(abs(r[x])) : cpp_int(gcd(common, r[x]));
      }
      if (common > 1)
        for (size_t x = 0; x < dim; ++x) r[x] /= common;
    }
    size_t lead = dim;
    for (size_t c = 0; c < dim; ++c)
      if (r[c] != 0) {
        lead = c;
        break;
      }
    if (lead == dim) continue;
    auto pos = std::lower_bound(pivots.begin(), pivots.end(), lead) - pivots.begin();
    pivots.insert(pivots.begin() + pos, lead);
    basis.insert(basis.begin() + pos, std::move(r));
  }
  return static_cast<int>(basis.size());
}

int dimension(const VertexSet& vertices) { return affine_rank(vertices.points); }
int dimension(const ObjectConfig& config) { return dimension(enumerate_vertices(config)); }

int64_t form_value(const LinearForm& f, const std::vector<int>& point) {
  int64_t v = 0;
  for (size_t e = 0; e < f.var.size(); ++e) v += static_cast<int64_t>(f.coef[e]) * point[f.var[e]];
  return v;
}

FacetCheck verify_facet(const LinearForm& f, const VertexSet& vertices, int dim) {
  FacetCheck out;
  std::vector<std::vector<int>> tight;
  for (size_t v = 0; v < vertices.size(); ++v) {
    const int64_t lhs = form_value(f, vertices.points[v]);
    bool ok = f.sense == RowSense::kLe ? lhs <= f.rhs : f.sense == RowSense::kGe ? lhs >= f.rhs : lhs == f.rhs;
    if (!ok && out.valid) {
      out.valid = false;
      out.violating_vertex = static_cast<int>(v);
    }
    if (lhs == f.rhs) tight.push_back(vertices.points[v]);
  }
  out.tight_count = static_cast<int>(tight.size());
  out.tight_rank = affine_rank(tight);
  out.is_facet = out.valid && out.tight_rank == dim - 1;
  return out;
}

FacetCheck verify_facet(const LinearForm& f, const ObjectConfig& config) {
  VertexSet v = enumerate_vertices(config);
  return verify_facet(f, v, dimension(v));
}

namespace {

std::vector<std::vector<int>> nonempty_subsets(int size) {
  std::vector<std::vector<int>> out;
  for (uint32_t mask = 1; mask < (1u << size); ++mask) {
    std::vector<int> s;
    for (int b = 0; b < size; ++b)
      if (mask >> b & 1) s.push_back(b);
    out.push_back(std::move(s));
  }
  return out;
}

std::string set_text(const std::vector<int>& s) {
  std::string out = "{";
  for (size_t a = 0; a < s.size(); ++a) out += (a ? "," : "") + std::to_string(s[a] + 1);
  return out + "}";
}

std::string var_text(const ObjectConfig& c, int i, int j, int t, int q) {
  (void)c;
  return "X" + std::to_string(t + 1) + std::to_string(q + 1) + "(" + std::to_string(i + 1) + "," +
         std::to_string(j + 1) + ")";
}

}  // namespace

std::vector<NamedInequality> inequality_family(const ObjectConfig& config, const std::string& family) {
  std::vector<NamedInequality> out;
  const int n = config.n();
  if (family == "nonneg") {
    for (int p = 0; p < config.num_pairs(); ++p) {
      auto [i, j] = config.pair_at(p);
      for (int t = 0; t < config.size(i); ++t)
        for (int q = 0; q < config.size(j); ++q) {
          LinearForm f{{config.var(i, j, t, q)}, {1}, RowSense::kGe, 0};
          out.push_back({var_text(config, i, j, t, q) + " >= 0", f});
        }
    }
  } else if (family == "rowsum") {
    for (int p = 0; p < config.num_pairs(); ++p) {
      auto [i, j] = config.pair_at(p);
      for (int t = 0; t < config.size(i); ++t) {
        LinearForm f;
        for (int q = 0; q < config.size(j); ++q) {
          f.var.push_back(config.var(i, j, t, q));
          f.coef.push_back(1);
        }
        f.rhs = 1;
        out.push_back({"row " + std::to_string(t + 1) + " of X(" + std::to_string(i + 1) + "," +
                           std::to_string(j + 1) + ") <= 1",
                       f});
      }
      for (int q = 0; q < config.size(j); ++q) {
        LinearForm f;
        for (int t = 0; t < config.size(i); ++t) {
          f.var.push_back(config.var(i, j, t, q));
          f.coef.push_back(1);
        }
        f.rhs = 1;
        out.push_back({"column " + std::to_string(q + 1) + " of X(" + std::to_string(i + 1) + "," +
                           std::to_string(j + 1) + ") <= 1",
                       f});
      }
    }
  } else if (family == "consistency" || family == "block") {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = j + 1; k < n; ++k)
          for (Orientation o : {Orientation::kPivotInK, Orientation::kPivotInI, Orientation::kPivotInJ}) {
            Triple tr{i, j, k};
            Roles r = roles(tr, o);
            auto s1 = nonempty_subsets(config.size(r.first));
            auto s2 = nonempty_subsets(config.size(r.second));
            std::string head = std::string(to_string(o)) + " (" + std::to_string(i + 1) + "," +
                               std::to_string(j + 1) + "," + std::to_string(k + 1) + ")";
            if (family == "consistency") {
              for (int l = 0; l < config.size(r.pivot); ++l)
                for (const auto& d1 : s1)
                  for (const auto& d2 : s2) {
                    ConsistencyCut c{tr, o, l, d1, d2};
                    out.push_back({head + " l=" + std::to_string(l + 1) + " D1=" + set_text(d1) + " D2=" + set_text(d2),
                                   linear_form(c, config)});
                  }
            } else {
              for (const auto& d3 : nonempty_subsets(config.size(r.pivot)))
                for (const auto& d1 : s1)
                  for (const auto& d2 : s2) {
                    BlockCut c{tr, o, d1, d2, d3};
                    out.push_back({head + " D1=" + set_text(d1) + " D2=" + set_text(d2) + " D3=" + set_text(d3),
                                   linear_form(Cut{c}, config)});
                  }
            }
          }
  } else if (family == "size") {
    const int total = static_cast<int>(config.total_elements());
    int d_max = config.max_size();
    for (int m_hat = std::max(d_max, 2); m_hat <= total - 1; ++m_hat) {
      std::vector<int> pick(m_hat + 1);
      std::iota(pick.begin(), pick.end(), 0);
      while (true) {
        SizeCut c = make_size_cut(pick, m_hat, config);
        std::string name = "m_hat=" + std::to_string(m_hat) + " N'={";
        for (size_t a = 0; a < pick.size(); ++a) {
          auto [i, t] = config.element_at(pick[a]);
          name += (a ? "," : "") + std::to_string(i + 1) + "_" + std::to_string(t + 1);
        }
        out.push_back({name + "}", linear_form(Cut{c}, config), m_hat});
        int x = m_hat;
        while (x >= 0 && pick[x] == total - (m_hat + 1) + x) --x;
        if (x < 0) break;
        ++pick[x];
        for (int y = x + 1; y <= m_hat; ++y) pick[y] = pick[y - 1] + 1;
      }
    }
  } else {
    throw ConfigError("unknown inequality family '" + family + "'");
  }
  return out;
}

HullResult hull_membership(const std::vector<double>& point, const VertexSet& vertices, const LpOptions& options) {
  const int dim = static_cast<int>(point.size());
  const int count = static_cast<int>(vertices.size());
  if (count == 0) throw ConfigError("empty vertex set");
  if (static_cast<int>(vertices.points.front().size()) != dim) throw ConfigError("point has the wrong length");
  LpModel m;
  for (int v = 0; v < count; ++v) m.add_column(0, kInf, 0);
  for (int r = 0; r < dim; ++r) {
    m.add_column(0, kInf, 1);
    m.add_column(0, kInf, 1);
  }
  for (int r = 0; r < dim; ++r) {
    std::vector<int> idx;
    std::vector<double> val;
    for (int v = 0; v < count; ++v)
      if (vertices.points[v][r]) {
        idx.push_back(v);
        val.push_back(vertices.points[v][r]);
      }
    idx.push_back(count + 2 * r);
    val.push_back(1);
    idx.push_back(count + 2 * r + 1);
    val.push_back(-1);
    m.add_row(idx, val, RowSense::kEq, point[r]);
  }
  std::vector<int> idx(count);
  std::iota(idx.begin(), idx.end(), 0);
  m.add_row(idx, std::vector<double>(count, 1.0), RowSense::kEq, 1);
  LpSolution sol = solve(m, options);
  if (!sol.optimal()) throw std::runtime_error(std::string("hull LP failed: ") + to_string(sol.status));
  HullResult out;
  out.residual = sol.objective;
  if (sol.objective <= 1e-9) {
    out.inside = true;
    out.weights.assign(sol.x.begin(), sol.x.begin() + count);
    return out;
  }
  // Row duals of the coordinate rows give the normal; the right-hand side is
  // recomputed over the vertices.
  auto fill = [&](double sign) {
    out.normal.assign(dim, 0.0);
    for (int r = 0; r < dim; ++r) out.normal[r] = sign * sol.row_dual[r];
    out.rhs = -kInf;
    for (int v = 0; v < count; ++v) {
      double s = 0;
      for (int r = 0; r < dim; ++r) s += out.normal[r] * vertices.points[v][r];
      out.rhs = std::max(out.rhs, s);
    }
    out.point_value = 0;
    for (int r = 0; r < dim; ++r) out.point_value += out.normal[r] * point[r];
  };
  fill(1);
  if (out.point_value <= out.rhs) fill(-1);
  return out;
}

HullResult hull_membership(const RealMaps& point, const LpOptions& options) {
  return hull_membership(point.flatten(), enumerate_vertices(point.config()), options);
}

OracleResult ilp_oracle(const Instance& inst, Formulation formulation) {
  require_small(inst.config, kOracleLimit);
  if (formulation == Formulation::kPermutation && !inst.config.uniform_size())
    throw ConfigError("the permutation formulation needs equal object sizes");
  VertexSet v = enumerate_vertices(inst.config);
  std::vector<double> a = CostTensor(inst).flatten();
  const int64_t full = inst.config.num_pairs() * static_cast<int64_t>(inst.config.size(0));
  OracleResult out;
  std::vector<size_t> best;
  for (size_t x = 0; x < v.size(); ++x) {
    // Partial maps of equal sizes are permutations exactly when d ones sit in every block.
    if (formulation == Formulation::kPermutation &&
        std::accumulate(v.points[x].begin(), v.points[x].end(), int64_t{0}) != full)
      continue;
    int64_t val = 0;
    for (size_t c = 0; c < a.size(); ++c) val += static_cast<int64_t>(a[c]) * v.points[x][c];
    if (best.empty() || val < out.optimum) {
      out.optimum = val;
      best.assign(1, x);
    } else if (val == out.optimum) {
      best.push_back(x);
    }
  }
  for (size_t x : best) out.argmin.push_back(BinaryMaps::from_flat(inst.config, v.points[x]));
  return out;
}

OracleResult ilp_oracle(const Instance& inst) { return ilp_oracle(inst, default_formulation(inst)); }

}  // namespace jomatch
