#include "jomatch/certificate.hpp"
#include "jomatch/driver.hpp"
#include "jomatch/polytope.hpp"
#include "jomatch/relaxation.hpp"
#include "jomatch/synth.hpp"

#include "paper_points.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"

using namespace jomatch;
using namespace jomatch::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string num(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

std::vector<std::vector<int>> nonempty_subsets(int d) {
  std::vector<std::vector<int>> out;
  for (int m = 1; m < (1 << d); ++m) {
    std::vector<int> s;
    for (int t = 0; t < d; ++t)
      if (m >> t & 1) s.push_back(t);
    out.push_back(s);
  }
  return out;
}

std::vector<BlockCut> all_block_cuts(const ObjectConfig& c) {
  std::vector<BlockCut> out;
  for (Orientation o : {Orientation::kPivotInK, Orientation::kPivotInI, Orientation::kPivotInJ}) {
    Roles r = roles({0, 1, 2}, o);
    for (const auto& d1 : nonempty_subsets(c.size(r.first)))
      for (const auto& d2 : nonempty_subsets(c.size(r.second)))
        for (const auto& d3 : nonempty_subsets(c.size(r.pivot))) out.push_back({{0, 1, 2}, o, d1, d2, d3});
  }
  return out;
}

bool satisfies(const LinearForm& f, const RationalMaps& s) {
  Rational lhs = evaluate(f, s);
  return f.sense == RowSense::kGe ? lhs >= Rational(f.rhs) : (f.sense == RowSense::kEq ? lhs == Rational(f.rhs)
                                                                                          : lhs <= Rational(f.rhs));
}

// ---- 1 ----

Outcome polytope_dimension() {
  auto start = Clock::now();
  Outcome o;
  const std::array<std::tuple<int, int, int>, 3> cases{{{3, 2, 12}, {3, 3, 27}, {4, 2, 24}}};
  for (auto [n, d, want] : cases) {
    int got = dimension(ObjectConfig::uniform(n, d));
    o.pass = o.pass && got == want;
    o.detail += "C_{" + std::to_string(n) + "," + std::to_string(d) + "}=" + std::to_string(got) + " ";
  }
  double t = seconds_since(start);
  o.pass = o.pass && t < 300;
  o.detail += "in " + num(t) + " s";
  return o;
}

// ---- 2 ----

Outcome facet_suite() {
  ObjectConfig c = ObjectConfig::uniform(3, 2);
  VertexSet v = enumerate_vertices(c);
  const int dim = dimension(v);
  Outcome o;
  o.pass = dim == 12;
  int checked = 0, bad = 0;
  for (const char* fam : {"nonneg", "rowsum", "consistency"})
    for (const auto& ineq : inequality_family(c, fam)) {
      FacetCheck f = verify_facet(ineq.form, v, dim);
      ++checked;
      if (!f.valid || f.tight_rank != dim - 1) ++bad;
    }
  int block_facets = 0, weak_valid = 0, weak_low_rank = 0;
  for (const BlockCut& b : all_block_cuts(c)) {
    FacetCheck f = verify_facet(linear_form(Cut{b}, c), v, dim);
    if (b.facet_grade()) {
      ++block_facets;
      if (!f.valid || f.tight_rank != dim - 1) ++bad;
    } else if (f.valid) {
      ++weak_valid;
      if (f.tight_rank < dim - 1) ++weak_low_rank;
    }
  }
  o.pass = o.pass && bad == 0 && weak_low_rank >= 1;
  o.detail = std::to_string(checked) + " family inequalities and " + std::to_string(block_facets) +
             " block cuts with |D1|+|D2|>|D3| checked, " + std::to_string(bad) + " failures; " +
             std::to_string(weak_low_rank) + " of " + std::to_string(weak_valid) + " other valid block cuts below rank 11";
  return o;
}

// ---- 3 ----

Outcome worked_examples() {
  ObjectConfig c = ObjectConfig::uniform(3, 2);
  Outcome o;
  auto check = [&](const std::string& name, const Rational& got, const Rational& want) {
    bool ok = got == want;
    o.pass = o.pass && ok;
    o.detail += (o.detail.empty() ? "" : " ") + name + "=" + got.str() + (ok ? "" : "(want " + want.str() + ")");
  };
  check("triangle", evaluate(triangle_form(c, {0, 1, 2, 0, 0, 0, 1}), triangle_point()), frac(5, 4));
  check("consistency_a", evaluate(Cut{ConsistencyCut{{0, 1, 2}, Orientation::kPivotInI, 0, {0, 1}, {1}}}, two_subset_point()),
        frac(3, 2));
  check("consistency_b",
        evaluate(Cut{ConsistencyCut{{0, 1, 2}, Orientation::kPivotInK, 1, {0, 1}, {0, 1}}}, third_point()), frac(4, 3));
  check("block", evaluate(Cut{BlockCut{{0, 1, 2}, Orientation::kPivotInK, {0}, {0, 1}, {0, 1}}}, block_point()),
        frac(5, 2));
  check("size_a", evaluate(Cut{make_size_cut({0, 1, 2, 3}, 3, c)}, size_point_a()), Rational(0));
  check("size_b", evaluate(Cut{make_size_cut({0, 2, 3, 4, 5}, 4, c)}, size_point_b()), Rational(0));

  RationalMaps ex = outside_point();
  int families = 0, violated_count = 0;
  for (const char* fam : {"nonneg", "rowsum", "consistency"})
    for (const auto& ineq : inequality_family(c, fam)) {
      ++families;
      if (!satisfies(ineq.form, ex)) ++violated_count;
    }
  for (const BlockCut& b : all_block_cuts(c)) {
    ++families;
    if (!satisfies(linear_form(Cut{b}, c), ex)) ++violated_count;
  }
  HullResult h = hull_membership(ex.cast<double>());
  o.pass = o.pass && violated_count == 0 && !h.inside;
  o.detail += "; outside point: " + std::to_string(violated_count) + " of " + std::to_string(families) +
              " family inequalities violated, hull says " + (h.inside ? "inside" : "outside") + " (a.x=" +
              num(h.point_value) + " > " + num(h.rhs) + ")";
  return o;
}

// ---- 4 ----

// Entries on a 1/64 grid with row and column sums at most one; every subset
// sum is then exact in double precision.
RealMaps random_point(const ObjectConfig& c, std::mt19937_64& g) {
  RealMaps s(c);
  const int density = 1 + static_cast<int>(g() % 4);
  for (int p = 0; p < c.num_pairs(); ++p) {
    auto& b = s.block_at(p);
    for (int t = 0; t < b.rows(); ++t)
      for (int q = 0; q < b.cols(); ++q)
        if (static_cast<int>(g() % 4) < density) b(t, q) = static_cast<double>(g() % 65) / 64.0;
    for (int t = 0; t < b.rows(); ++t) {
      double r = b.row(t).sum();
      if (r > 1) b.row(t) = (b.row(t) * (64.0 / r)).array().floor() / 64.0;
    }
    for (int q = 0; q < b.cols(); ++q) {
      double r = b.col(q).sum();
      if (r > 1) b.col(q) = (b.col(q) * (64.0 / r)).array().floor() / 64.0;
    }
  }
  return s;
}

Outcome separation_exactness() {
  Outcome o;
  std::mt19937_64 g(2024);
  int64_t points = 0, value_mismatch = 0, lp_mismatch = 0, fractional = 0, violated = 0;
  double worst_lp = 0;
  LpOptions lpo;
  lpo.backend = LpBackend::kBuiltin;
  for (int di = 2; di <= 7; ++di)
    for (int dk = 2; dk <= 7; ++dk)
      for (int rep = 0; rep < 1000; ++rep) {
        const int dj = 1 + rep % 3;
        ObjectConfig c({di, dj, dk});
        RealMaps s = random_point(c, g);
        const int l = static_cast<int>(g() % dj);
        SeparationData data = separation_data(s, {0, 1, 2}, Orientation::kPivotInJ, l);
        SeparationResult mc = maximize_by_mincut(data);
        SeparationResult en = maximize_by_enumeration(data);
        SeparationLpResult lp = maximize_by_lp(data, lpo);
        ++points;
        violated += mc.violated;
        if (mc.value != en.value) ++value_mismatch;
        double gap = lp.status == LpStatus::kOptimal ? std::fabs(lp.value - mc.value) : kInf;
        worst_lp = std::max(worst_lp, gap);
        if (gap > 1e-7) ++lp_mismatch;
        bool integral = true;
        for (double y : lp.y) integral = integral && std::fabs(y - std::round(y)) <= 1e-7;
        for (double z : lp.z) integral = integral && std::fabs(z - std::round(z)) <= 1e-7;
        if (!integral) ++fractional;
      }
  o.pass = value_mismatch == 0 && lp_mismatch == 0 && fractional == 0;
  o.detail = std::to_string(points) + " points over 36 shapes (" + std::to_string(violated) +
             " violated): min-cut vs enumeration mismatches " + std::to_string(value_mismatch) +
             ", LP mismatches " + std::to_string(lp_mismatch) + " (max gap " + num(worst_lp) + "), fractional LP " +
             std::to_string(fractional);
  return o;
}

// ---- 5 ----

Outcome oracle_sandwich() {
  Outcome o;
  const double tol = 1e-6;
  const double ps[] = {0.3, 0.6, 1.0};
  int order_fail = 0, binary_seen = 0, binary_fail = 0, not_converged = 0;
  for (int k = 0; k < 100; ++k) {
    const int n = k < 50 ? 3 : 4;
    Instance inst = generate({n, 2, ps[k % 3], 1.0, static_cast<uint64_t>(k)});
    SolveReport basic = solve_basic(inst);
    SolveReport lpf = cutting_plane_lpf(inst);
    OracleResult oracle = ilp_oracle(inst);
    if (lpf.status != SolveStatus::kOptimal) ++not_converged;
    if (basic.objective > lpf.objective + tol || lpf.objective > static_cast<double>(oracle.optimum) + tol)
      ++order_fail;
    for (const SolveReport* r : {&basic, &lpf})
      if (r->is_binary && r->is_consistent) {
        ++binary_seen;
        if (std::fabs(r->objective - static_cast<double>(oracle.optimum)) > tol) ++binary_fail;
      }
  }
  o.pass = order_fail == 0 && binary_fail == 0 && not_converged == 0;
  o.detail = "100 instances: order violations " + std::to_string(order_fail) + ", binary consistent solutions " +
             std::to_string(binary_seen) + " with " + std::to_string(binary_fail) +
             " off the oracle optimum, unconverged LPF " + std::to_string(not_converged);
  return o;
}

// ---- 6 ----

Outcome recovery_phase() {
  auto start = Clock::now();
  Outcome o;
  std::vector<double> rates;
  std::string curve;
  for (int step = 1; step <= 10; ++step) {
    const double p = step / 10.0;
    int recovered = 0;
    for (uint64_t seed = 0; seed < 20; ++seed) recovered += solve_basic(generate({20, 3, p, 1.0, seed})).recovered;
    rates.push_back(recovered / 20.0);
    curve += num(p) + ":" + num(rates.back()) + " ";
  }
  int inversions = 0;
  for (size_t k = 1; k < rates.size(); ++k) inversions += rates[k] < rates[k - 1];
  const double t = seconds_since(start);
  o.pass = rates[8] >= 0.9 && rates[0] <= 0.1 && inversions <= 1 && t < 1800;
  o.detail = curve + "inversions " + std::to_string(inversions) + ", " + num(t) + " s";
  return o;
}

// ---- 7 ----

Outcome certificate_soundness() {
  Outcome o;
  int instances = 0, strict = 0, counterexamples = 0;
  std::string notes;
  for (int n : {20, 50, 100})
    for (int d : {2, 3})
      for (double p : {0.7, 0.9})
        for (uint64_t seed = 0; seed < 5; ++seed) {
          ++instances;
          Instance inst = generate({n, d, p, 1.0, seed});
          ConditionsReport rep = check_conditions(inst);
          if (!rep.all_strict) continue;
          ++strict;
          SolveReport r = solve_basic(inst);
          DualCertificate cert = build_dual_certificate(inst);
          if (!r.recovered || !cert.verified || !(cert.gap <= 1e-6)) {
            ++counterexamples;
            notes += " (n=" + std::to_string(n) + ",d=" + std::to_string(d) + ",p=" + num(p) +
                     ",seed=" + std::to_string(seed) + ")";
          }
        }
  o.pass = counterexamples == 0 && strict > 0;
  o.detail = std::to_string(strict) + " of " + std::to_string(instances) + " instances all-strict, counterexamples " +
             std::to_string(counterexamples) + notes;
  return o;
}

// ---- 8 ----

Outcome threshold_curve() {
  auto start = Clock::now();
  Outcome o;
  std::vector<double> ps;
  for (int d : {2, 3, 5, 10, 20, 50}) {
    ps.push_back(recovery_threshold(d).p_star);
    o.detail += "d=" + std::to_string(d) + ":" + num(ps.back()) + " ";
  }
  bool monotone = true;
  for (size_t k = 1; k < ps.size(); ++k) monotone = monotone && ps[k] >= ps[k - 1] - 2e-3;
  const double t = seconds_since(start);
  o.pass = std::fabs(ps[0] - 1.0 / 3.0) <= 0.005 && ps[5] >= 0.575 && ps[5] <= 0.586 && monotone &&
           *std::max_element(ps.begin(), ps.end()) <= 0.586 && t < 600;
  o.detail += std::string(monotone ? "monotone" : "not monotone") + ", " + num(t) + " s";
  return o;
}

// ---- 9 ----

Outcome double_lp_dominance() {
  Outcome o;
  int dominated = 0, strictly = 0, points = 0;
  std::string strict_points;
  for (int step = 0; step <= 35; ++step) {
    const double p = std::round((0.3 + 0.02 * step) * 100) / 100;
    int basic = 0, dbl = 0;
    for (uint64_t seed = 0; seed < 10; ++seed) {
      Instance inst = generate({10, 5, p, 0.5, seed});
      basic += solve_basic(inst).is_binary;
      dbl += double_lp(inst).is_binary;
    }
    ++points;
    if (dbl >= basic) ++dominated;
    // A strict gap needs basic < 10 and double > 0, i.e. a point inside the transition.
    if (dbl > basic) {
      ++strictly;
      strict_points += " " + num(p) + "(" + std::to_string(basic) + "/" + std::to_string(dbl) + ")";
    }
  }
  o.pass = dominated == points && strictly >= 1;
  o.detail = std::to_string(dominated) + " of " + std::to_string(points) + " points with double >= basic tightness; " +
             "strictly greater at" + (strict_points.empty() ? " none" : strict_points);
  return o;
}

// ---- 10 ----

BinaryBlock random_partial_map(int rows, int cols, std::mt19937_64& g) {
  BinaryBlock b = BinaryBlock::Zero(rows, cols);
  std::vector<int> perm(cols);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), g);
  for (int t = 0; t < rows && t < cols; ++t)
    if (g() % 4) b(t, perm[t]) = 1;
  return b;
}

BinaryMaps random_consistent(const ObjectConfig& c, std::mt19937_64& g) {
  const int universe = c.max_size() + static_cast<int>(g() % 4);
  UniverseLabeling lab;
  for (int o = 0; o < c.n(); ++o) {
    std::vector<int> labels(universe);
    std::iota(labels.begin(), labels.end(), 1);
    std::shuffle(labels.begin(), labels.end(), g);
    labels.resize(c.size(o));
    for (int& v : labels)
      if (g() % 5 == 0) v = 0;
    lab.labels.push_back(labels);
  }
  return maps_from_labeling(c, lab);
}

Outcome objective_identity() {
  Outcome o;
  std::mt19937_64 g(77);
  int64_t mismatches = 0, library_mismatches = 0;
  for (int rep = 0; rep < 100000; ++rep) {
    const int n = 2 + static_cast<int>(g() % 4);
    std::vector<int> sizes(n);
    for (int& s : sizes) s = 1 + static_cast<int>(g() % 4);
    ObjectConfig c(sizes);
    Instance inst(c);
    for (int p = 0; p < c.num_pairs(); ++p) {
      if (g() % 5 == 0) continue;
      auto [i, j] = c.pair_at(p);
      inst.set_input(i, j, random_partial_map(c.size(i), c.size(j), g));
    }
    BinaryMaps x = random_consistent(c, g);
    int64_t direct = 0;
    for (int p = 0; p < c.num_pairs(); ++p) {
      if (!inst.input[p]) continue;
      const BinaryBlock& xin = *inst.input[p];
      const BinaryBlock& xb = x.block_at(p);
      for (int t = 0; t < xin.rows(); ++t)
        for (int q = 0; q < xin.cols(); ++q) {
          const int64_t diff = xin(t, q) - xb(t, q);
          direct += diff * diff;
        }
    }
    const int64_t lhs = inst.matched_pairs() + static_cast<int64_t>(linear_objective(inst, x));
    if (lhs != direct) ++mismatches;
    if (frobenius_objective(inst, x) != direct) ++library_mismatches;
  }
  o.pass = mismatches == 0 && library_mismatches == 0;
  o.detail = "100000 pairs: identity mismatches " + std::to_string(mismatches) + ", library Frobenius mismatches " +
             std::to_string(library_mismatches);
  return o;
}

const std::array<std::pair<const char*, std::function<Outcome()>>, 10> kCriteria{{
    {"polytope dimension", polytope_dimension},
    {"facetness suite", facet_suite},
    {"worked examples", worked_examples},
    {"separation exactness", separation_exactness},
    {"oracle sandwich", oracle_sandwich},
    {"recovery phase behavior", recovery_phase},
    {"certificate soundness", certificate_soundness},
    {"threshold curve", threshold_curve},
    {"double LP dominance", double_lp_dominance},
    {"objective identity", objective_identity},
}};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks; one PASS/FAIL line per criterion"};
  int only = 0;
  app.add_option("--criterion", only, "Run a single criterion (1-10); all when omitted")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);
  bool all_pass = true;
  for (int k = 1; k <= 10; ++k) {
    if (only && k != only) continue;
    const auto& [name, run] = kCriteria[k - 1];
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << k << " " << (o.pass ? "PASS" : "FAIL") << " " << name << ": " << o.detail << std::endl;
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
