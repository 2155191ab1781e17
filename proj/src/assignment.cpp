#include "jomatch/assignment.hpp"

#include <algorithm>
#include <limits>

namespace jomatch {

std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weight) {
  const int rows = static_cast<int>(weight.rows()), cols = static_cast<int>(weight.cols());
  const int n = std::max(rows, cols);
  if (n == 0) return {};
  // Potentials formulation on 1-based arrays, minimising -weight.
  auto cost = [&](int r, int c) { return (r < rows && c < cols) ? -weight(r, c) : 0.0; };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0), v(n + 1, 0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int r = 1; r <= n; ++r) {
    match[0] = r;
    int c0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[c0] = true;
      int r0 = match[c0], c1 = 0;
      double delta = inf;
      for (int c = 1; c <= n; ++c) {
        if (used[c]) continue;
        double cur = cost(r0 - 1, c - 1) - u[r0] - v[c];
        if (cur < minv[c]) {
          minv[c] = cur;
          way[c] = c0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          c1 = c;
        }
      }
      for (int c = 0; c <= n; ++c) {
        if (used[c]) {
          u[match[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      c0 = c1;
    } while (match[c0] != 0);
    do {
      int c1 = way[c0];
      match[c0] = match[c1];
      c0 = c1;
    } while (c0);
  }
  std::vector<int> assign(rows, -1);
  for (int c = 1; c <= n; ++c)
    if (match[c] - 1 < rows && c - 1 < cols) assign[match[c] - 1] = c - 1;
  return assign;
}

}  // namespace jomatch
