#pragma once

// Weighted undirected graphs and Leiden community detection under the
// modularity quality function.

#include "planekit/common.hpp"

#include <cstdint>
#include <vector>

namespace planekit {

struct WeightedEdge {
  int u = 0;
  int v = 0;
  double weight = 0.0;
};

/// Symmetric CSR adjacency. Off-diagonal entries are stored in both
/// directions; self_loop[i] holds A_ii (counted once in the degree).
class WeightedGraph {
 public:
  WeightedGraph() = default;
  /// Builds from unordered edges; duplicates are summed, u == v adds A_uu.
  WeightedGraph(int node_count, const std::vector<WeightedEdge>& edges);

  int node_count() const { return int(self_loop_.size()); }
  double degree(int v) const { return degree_[v]; }
  double self_loop(int v) const { return self_loop_[v]; }
  /// Sum of all degrees (2m).
  double total_weight() const { return total_; }

  std::int64_t begin(int v) const { return offsets_[v]; }
  std::int64_t end(int v) const { return offsets_[v + 1]; }
  int target(std::int64_t e) const { return targets_[e]; }
  double weight(std::int64_t e) const { return weights_[e]; }

  /// Collapses nodes by membership (values 0..k-1) into a k-node graph.
  WeightedGraph aggregate(const std::vector<int>& membership, int community_count) const;

 private:
  std::vector<std::int64_t> offsets_{0};
  std::vector<int> targets_;
  std::vector<double> weights_;
  std::vector<double> self_loop_;
  std::vector<double> degree_;
  double total_ = 0.0;
};

/// Q = 1/(2m) * sum_ij [A_ij - resolution * k_i k_j / (2m)] delta(c_i, c_j).
/// Nodes with membership < 0 contribute only through the degree sums.
/// Throws when the graph has no edges.
double modularity(const WeightedGraph& graph, const std::vector<int>& membership, double resolution = 1.0);

struct LeidenResult {
  std::vector<int> membership;       ///< community per node, 0..count-1
  int community_count = 0;
  std::vector<double> quality_trace; ///< modularity after each local-moving phase
};

/// Leiden loop (fast local moving, greedy refinement, aggregation on the
/// refined partition) until the partition is stable. Deterministic for a
/// given seed. Every returned community is connected.
LeidenResult leiden(const WeightedGraph& graph, std::uint64_t seed, double resolution = 1.0,
                    int max_levels = 64);

/// Relabels communities 0..k-1 in order of first occurrence; negative
/// labels are preserved. Returns k.
int compact_labels(std::vector<int>& membership);

}  // namespace planekit
