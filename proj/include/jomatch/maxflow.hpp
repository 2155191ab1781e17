#pragma once

#include <vector>

namespace jomatch {

// Dinic's algorithm on a small directed graph with nonnegative capacities.
class MaxFlow {
 public:
  explicit MaxFlow(int nodes);
  void add_arc(int from, int to, double capacity);
  double run(int source, int sink);
  // Nodes reachable from the source in the final residual graph.
  std::vector<bool> source_side() const;

 private:
  struct Arc {
    int to;
    int rev;
    double cap;
  };
  bool bfs();
  double dfs(int v, double pushed);

  std::vector<std::vector<Arc>> adj_;
  std::vector<int> level_, next_;
  int source_ = 0, sink_ = 0;
};

}  // namespace jomatch
