#include "jomatch/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace jomatch {

std::array<double, 3> threshold_constraints(double p, double alpha, double beta, int d) {
  const double dd = d;
  const double c1 = p / beta + (1 - p) * (1 / (beta * dd) - 1 / alpha);
  const double c2 = (p + (1 - p) / dd) * (p / (beta * dd) + (1 / (beta * dd) - 1 / alpha) * (1 - p) / dd + 1 / alpha) - 0.5;
  const double c3 = 2 * (p * p / beta + (1 / alpha - 1 / beta) * p + (0.5 - 1 / alpha)) +
                    (4 / alpha - 2 / beta) * (p - 1) * (p - 1) * (dd - 1) / (dd * dd) + 2 * p / (beta * dd);
  return {c1, c2, c3};
}

namespace {

bool feasible(double p, double alpha, double beta, int d) {
  auto c = threshold_constraints(p, alpha, beta, d);
  return c[0] >= 0 && c[1] >= 0 && c[2] >= 0;
}

// First feasible p on the scan, refined by bisection against the previous
// scan point. Stops early once the scan passes `cutoff`.
double first_feasible(double alpha, double beta, int d, double p_step, double cutoff) {
  const double lo = 0.25;
  if (feasible(lo, alpha, beta, d)) return lo;
  const int steps = static_cast<int>(std::ceil((1 - lo) / p_step));
  double prev = lo;
  for (int s = 1; s <= steps; ++s) {
    double p = std::min(1.0, lo + s * p_step);
    if (p > cutoff + p_step) return 2;
    if (feasible(p, alpha, beta, d)) {
      double a = prev, b = p;
      for (int it = 0; it < 60 && b - a > 1e-12; ++it) {
        double m = 0.5 * (a + b);
        (feasible(m, alpha, beta, d) ? b : a) = m;
      }
      return b;
    }
    prev = p;
  }
  return 2;
}

struct Candidate {
  double p = 2, alpha = 0, beta = 0;
  bool better_than(const Candidate& o) const {
    if (p != o.p) return p < o.p;
    if (alpha != o.alpha) return alpha < o.alpha;
    return beta < o.beta;
  }
};

// Golden-section search of f on [a, b].
template <typename F>
double golden(F f, double a, double b, int iterations) {
  const double g = (std::sqrt(5.0) - 1) / 2;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < iterations; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace

double min_feasible_p(double alpha, double beta, int d, double p_step) {
  return first_feasible(alpha, beta, d, p_step, 1.0);
}

ThresholdResult recovery_threshold(int d, const ThresholdOptions& options) {
  if (d < 2) throw ConfigError("the threshold needs d >= 2");
  if (!(options.grid_step > 0) || !(options.p_step > 0)) throw ConfigError("threshold steps must be positive");
  if (!feasible(1.0, 1.0, 1.0, d)) throw std::logic_error("threshold problem infeasible at p=1, alpha=beta=1");

  const double lo = 0.05, hi = 2.0;
  const int count = static_cast<int>(std::floor((hi - lo) / options.grid_step + 1e-9)) + 1;
  auto grid = [&](int k) { return std::min(hi, lo + k * options.grid_step); };

  const int threads = std::max(1, options.threads);
  std::vector<Candidate> best(threads);
  auto work = [&](int w) {
    Candidate b;
    for (int ia = w; ia < count; ia += threads) {
      const double alpha = grid(ia);
      for (int ib = ia; ib < count; ++ib) {
        const double beta = grid(ib);
        double p = first_feasible(alpha, beta, d, options.p_step, std::min(1.0, b.p));
        Candidate c{p, alpha, beta};
        if (p <= 1 && c.better_than(b)) b = c;
      }
    }
    best[w] = b;
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  Candidate b;
  for (const auto& c : best)
    if (c.better_than(b)) b = c;
  if (b.p > 1) throw std::logic_error("threshold grid found no feasible point");

  // Alternating golden-section refinement around the grid optimum.
  const double fine = options.p_step / 100;
  auto at = [&](double alpha, double beta) {
    if (alpha > beta || alpha <= 0 || beta > hi) return 2.0;
    return first_feasible(alpha, beta, d, fine, 1.0);
  };
  double alpha = b.alpha, beta = b.beta, p = at(alpha, beta);
  for (int pass = 0; pass < 3; ++pass) {
    double a2 = golden([&](double x) { return at(x, beta); }, std::max(1e-3, alpha - options.grid_step),
                       std::min(beta, alpha + options.grid_step), 30);
    if (double v = at(a2, beta); v < p) {
      p = v;
      alpha = a2;
    }
    double b2 = golden([&](double x) { return at(alpha, x); }, std::max(alpha, beta - options.grid_step),
                       std::min(hi, beta + options.grid_step), 30);
    if (double v = at(alpha, b2); v < p) {
      p = v;
      beta = b2;
    }
  }
  return {std::min(p, b.p), alpha, beta};
}

}  // namespace jomatch
