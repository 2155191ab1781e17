#include "jomatch/maxflow.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace jomatch {

namespace {
constexpr double kFlowEps = 1e-12;
}

MaxFlow::MaxFlow(int nodes) : adj_(nodes) {}

void MaxFlow::add_arc(int from, int to, double capacity) {
  if (capacity <= 0) return;
  adj_[from].push_back({to, static_cast<int>(adj_[to].size()), capacity});
  adj_[to].push_back({from, static_cast<int>(adj_[from].size()) - 1, 0.0});
}

bool MaxFlow::bfs() {
  level_.assign(adj_.size(), -1);
  std::queue<int> queue;
  level_[source_] = 0;
  queue.push(source_);
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop();
    for (const Arc& a : adj_[v])
      if (a.cap > kFlowEps && level_[a.to] < 0) {
        level_[a.to] = level_[v] + 1;
        queue.push(a.to);
      }
  }
  return level_[sink_] >= 0;
}

double MaxFlow::dfs(int v, double pushed) {
  if (v == sink_) return pushed;
  for (int& e = next_[v]; e < static_cast<int>(adj_[v].size()); ++e) {
    Arc& a = adj_[v][e];
    if (a.cap <= kFlowEps || level_[a.to] != level_[v] + 1) continue;
    double got = dfs(a.to, std::min(pushed, a.cap));
    if (got > 0) {
      a.cap -= got;
      adj_[a.to][a.rev].cap += got;
      return got;
    }
  }
  return 0;
}

double MaxFlow::run(int source, int sink) {
  source_ = source;
  sink_ = sink;
  double flow = 0;
  while (bfs()) {
    next_.assign(adj_.size(), 0);
    while (double pushed = dfs(source_, std::numeric_limits<double>::infinity())) flow += pushed;
  }
  return flow;
}

std::vector<bool> MaxFlow::source_side() const {
  std::vector<bool> seen(adj_.size(), false);
  std::queue<int> queue;
  seen[source_] = true;
  queue.push(source_);
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop();
    for (const Arc& a : adj_[v])
      if (a.cap > kFlowEps && !seen[a.to]) {
        seen[a.to] = true;
        queue.push(a.to);
      }
  }
  return seen;
}

}  // namespace jomatch
