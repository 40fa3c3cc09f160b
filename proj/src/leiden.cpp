#include "planekit/leiden.hpp"

#include "planekit/random.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <unordered_map>

namespace planekit {

WeightedGraph::WeightedGraph(int node_count, const std::vector<WeightedEdge>& edges) {
  if (node_count < 0) throw Error(ErrorCode::InvalidArgument, "negative node count");
  self_loop_.assign(node_count, 0.0);
  degree_.assign(node_count, 0.0);
  std::vector<std::int64_t> counts(std::size_t(node_count) + 1, 0);
  for (const auto& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= node_count || e.v >= node_count) {
      throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
    }
    if (e.u == e.v) continue;
    ++counts[e.u + 1];
    ++counts[e.v + 1];
  }
  offsets_.assign(std::size_t(node_count) + 1, 0);
  for (int v = 0; v < node_count; ++v) offsets_[v + 1] = offsets_[v] + counts[v + 1];
  targets_.assign(offsets_.back(), 0);
  weights_.assign(offsets_.back(), 0.0);
  std::vector<std::int64_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges) {
    if (e.u == e.v) {
      self_loop_[e.u] += e.weight;
      continue;
    }
    targets_[fill[e.u]] = e.v;
    weights_[fill[e.u]++] = e.weight;
    targets_[fill[e.v]] = e.u;
    weights_[fill[e.v]++] = e.weight;
  }

  // sort each row by target and merge duplicates
  std::vector<std::int64_t> new_offsets(std::size_t(node_count) + 1, 0);
  std::vector<std::pair<int, double>> row;
  std::int64_t out = 0;
  for (int v = 0; v < node_count; ++v) {
    row.clear();
    for (std::int64_t e = offsets_[v]; e < offsets_[v + 1]; ++e) row.emplace_back(targets_[e], weights_[e]);
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    new_offsets[v] = out;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (out > new_offsets[v] && targets_[out - 1] == row[i].first) {
        weights_[out - 1] += row[i].second;
      } else {
        targets_[out] = row[i].first;
        weights_[out] = row[i].second;
        ++out;
      }
    }
  }
  new_offsets[node_count] = out;
  offsets_ = std::move(new_offsets);
  targets_.resize(out);
  weights_.resize(out);

  total_ = 0.0;
  for (int v = 0; v < node_count; ++v) {
    double k = self_loop_[v];
    for (std::int64_t e = offsets_[v]; e < offsets_[v + 1]; ++e) k += weights_[e];
    degree_[v] = k;
    total_ += k;
  }
}

WeightedGraph WeightedGraph::aggregate(const std::vector<int>& membership, int community_count) const {
  std::vector<WeightedEdge> edges;
  edges.reserve(targets_.size() / 2 + self_loop_.size());
  for (int v = 0; v < node_count(); ++v) {
    const int cv = membership[v];
    if (self_loop_[v] != 0.0) edges.push_back({cv, cv, self_loop_[v]});
    for (std::int64_t e = offsets_[v]; e < offsets_[v + 1]; ++e) {
      const int u = targets_[e];
      if (u < v) continue;
      const int cu = membership[u];
      // an internal edge contributes to A_cc from both orientations
      if (cu == cv) {
        edges.push_back({cv, cv, 2.0 * weights_[e]});
      } else {
        edges.push_back({cv, cu, weights_[e]});
      }
    }
  }
  return WeightedGraph(community_count, edges);
}

int compact_labels(std::vector<int>& membership) {
  std::unordered_map<int, int> remap;
  int next = 0;
  for (int& m : membership) {
    if (m < 0) continue;
    auto [it, inserted] = remap.try_emplace(m, next);
    if (inserted) ++next;
    m = it->second;
  }
  return next;
}

double modularity(const WeightedGraph& graph, const std::vector<int>& membership, double resolution) {
  const double m2 = graph.total_weight();
  if (!(m2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "modularity of a graph without edges");
  if (int(membership.size()) != graph.node_count()) {
    throw Error(ErrorCode::DimensionMismatch, "membership length differs from node count");
  }
  int max_label = -1;
  for (int c : membership) max_label = std::max(max_label, c);
  std::vector<double> internal(std::size_t(max_label + 1), 0.0);
  std::vector<double> totals(std::size_t(max_label + 1), 0.0);
  for (int v = 0; v < graph.node_count(); ++v) {
    const int c = membership[v];
    if (c < 0) continue;
    totals[c] += graph.degree(v);
    internal[c] += graph.self_loop(v);
    for (std::int64_t e = graph.begin(v); e < graph.end(v); ++e) {
      if (membership[graph.target(e)] == c) internal[c] += graph.weight(e);
    }
  }
  double q = 0.0;
  for (std::size_t c = 0; c < internal.size(); ++c) q += internal[c] - resolution * totals[c] * totals[c] / m2;
  return q / m2;
}

namespace {

// Sparse accumulator keyed by community id.
class NeighborWeights {
 public:
  explicit NeighborWeights(int n) : weight_(n, 0.0), seen_(n, 0) {}

  void add(int c, double w) {
    if (!seen_[c]) {
      seen_[c] = 1;
      keys_.push_back(c);
    }
    weight_[c] += w;
  }
  double get(int c) const { return weight_[c]; }
  const std::vector<int>& keys() const { return keys_; }
  void clear() {
    for (int c : keys_) {
      weight_[c] = 0.0;
      seen_[c] = 0;
    }
    keys_.clear();
  }

 private:
  std::vector<double> weight_;
  std::vector<std::uint8_t> seen_;
  std::vector<int> keys_;
};

constexpr double kGainEps = 1e-12;

// Queue-based local moving. Returns true when any node changed community.
bool move_nodes_fast(const WeightedGraph& g, std::vector<int>& part, double resolution, Rng& rng) {
  const int n = g.node_count();
  const double m2 = g.total_weight();
  std::vector<double> tot(n, 0.0);
  std::vector<int> size(n, 0);
  for (int v = 0; v < n; ++v) {
    tot[part[v]] += g.degree(v);
    ++size[part[v]];
  }
  std::vector<int> empty;
  for (int c = n - 1; c >= 0; --c) {
    if (size[c] == 0) empty.push_back(c);
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::deque<int> queue(order.begin(), order.end());
  std::vector<std::uint8_t> queued(n, 1);
  NeighborWeights nw(n);
  bool changed = false;

  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    queued[v] = 0;
    const double kv = g.degree(v);
    const int old = part[v];

    nw.clear();
    for (std::int64_t e = g.begin(v); e < g.end(v); ++e) nw.add(part[g.target(e)], g.weight(e));

    tot[old] -= kv;
    --size[old];
    int best = old;
    double best_gain = nw.get(old) - resolution * kv * tot[old] / m2;
    for (int c : nw.keys()) {
      const double gain = nw.get(c) - resolution * kv * tot[c] / m2;
      if (gain > best_gain + kGainEps) {
        best_gain = gain;
        best = c;
      }
    }
    if (size[old] > 0 && 0.0 > best_gain + kGainEps && !empty.empty()) {
      best = empty.back();
    }
    if (best != old && size[old] == 0) empty.push_back(old);
    if (!empty.empty() && best == empty.back()) empty.pop_back();

    tot[best] += kv;
    ++size[best];
    part[v] = best;
    if (best != old) {
      changed = true;
      for (std::int64_t e = g.begin(v); e < g.end(v); ++e) {
        const int u = g.target(e);
        if (part[u] != best && !queued[u]) {
          queued[u] = 1;
          queue.push_back(u);
        }
      }
    }
  }
  return changed;
}

// Greedy refinement inside each community: nodes merge only into
// well-connected refined subsets of their own community.
std::vector<int> refine_partition(const WeightedGraph& g, const std::vector<int>& part, int community_count,
                                  double resolution, Rng& rng) {
  const int n = g.node_count();
  const double m2 = g.total_weight();
  std::vector<int> refined(n);
  std::iota(refined.begin(), refined.end(), 0);
  std::vector<double> k_refined(n), ext_refined(n), ext_node(n, 0.0);
  std::vector<int> refined_size(n, 1);
  std::vector<std::vector<int>> members(community_count);
  std::vector<double> k_comm(community_count, 0.0);
  for (int v = 0; v < n; ++v) {
    members[part[v]].push_back(v);
    k_comm[part[v]] += g.degree(v);
  }
  for (int v = 0; v < n; ++v) {
    for (std::int64_t e = g.begin(v); e < g.end(v); ++e) {
      if (part[g.target(e)] == part[v]) ext_node[v] += g.weight(e);
    }
    k_refined[v] = g.degree(v);
    ext_refined[v] = ext_node[v];
  }

  NeighborWeights nw(n);
  for (int c = 0; c < community_count; ++c) {
    auto& nodes = members[c];
    if (nodes.size() < 2) continue;
    std::shuffle(nodes.begin(), nodes.end(), rng);
    const double kc = k_comm[c];
    for (int v : nodes) {
      if (refined_size[refined[v]] != 1) continue;
      const double kv = g.degree(v);
      if (ext_node[v] < resolution * kv * (kc - kv) / m2) continue;

      nw.clear();
      for (std::int64_t e = g.begin(v); e < g.end(v); ++e) {
        const int u = g.target(e);
        if (part[u] == c) nw.add(refined[u], g.weight(e));
      }
      const int own = refined[v];
      int best = own;
      double best_gain = 0.0;
      for (int r : nw.keys()) {
        if (r == own) continue;
        if (ext_refined[r] < resolution * k_refined[r] * (kc - k_refined[r]) / m2) continue;
        const double gain = nw.get(r) - resolution * kv * k_refined[r] / m2;
        if (gain > best_gain + kGainEps) {
          best_gain = gain;
          best = r;
        }
      }
      if (best == own) continue;
      refined[v] = best;
      --refined_size[own];
      ++refined_size[best];
      ext_refined[best] = ext_refined[best] + ext_node[v] - 2.0 * nw.get(best);
      k_refined[best] += kv;
    }
  }
  return refined;
}

// Splits communities that are not connected in `g` into their components.
int split_disconnected(const WeightedGraph& g, std::vector<int>& membership) {
  const int n = g.node_count();
  std::vector<int> out(n, -1);
  int next = 0;
  std::deque<int> queue;
  for (int s = 0; s < n; ++s) {
    if (out[s] >= 0) continue;
    out[s] = next;
    queue.push_back(s);
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (std::int64_t e = g.begin(v); e < g.end(v); ++e) {
        const int u = g.target(e);
        if (out[u] < 0 && membership[u] == membership[s]) {
          out[u] = next;
          queue.push_back(u);
        }
      }
    }
    ++next;
  }
  membership = std::move(out);
  return next;
}

}  // namespace

LeidenResult leiden(const WeightedGraph& graph, std::uint64_t seed, double resolution, int max_levels) {
  const int n = graph.node_count();
  LeidenResult result;
  result.membership.resize(n);
  std::iota(result.membership.begin(), result.membership.end(), 0);
  result.community_count = n;
  if (n == 0 || !(graph.total_weight() > 0.0)) return result;

  Rng rng(seed);
  WeightedGraph level = graph;
  std::vector<int> part(n);
  std::iota(part.begin(), part.end(), 0);
  std::vector<int> node_of(n);  // original node -> node of the current level graph
  std::iota(node_of.begin(), node_of.end(), 0);

  auto flattened = [&]() {
    std::vector<int> flat(n);
    for (int v = 0; v < n; ++v) flat[v] = part[node_of[v]];
    return flat;
  };

  for (int depth = 0; depth < max_levels; ++depth) {
    const bool moved = move_nodes_fast(level, part, resolution, rng);
    const int count = compact_labels(part);
    result.quality_trace.push_back(modularity(graph, flattened(), resolution));
    if (count == level.node_count() || (depth > 0 && !moved)) break;

    std::vector<int> refined = refine_partition(level, part, count, resolution, rng);
    const int refined_count = compact_labels(refined);
    std::vector<int> next_part(refined_count, 0);
    for (int v = 0; v < level.node_count(); ++v) next_part[refined[v]] = part[v];
    level = level.aggregate(refined, refined_count);
    for (int v = 0; v < n; ++v) node_of[v] = refined[node_of[v]];
    part = std::move(next_part);
  }

  result.membership = flattened();
  const int before = compact_labels(result.membership);
  result.community_count = split_disconnected(graph, result.membership);
  if (result.community_count != before) {
    result.quality_trace.push_back(modularity(graph, result.membership, resolution));
  }
  return result;
}

}  // namespace planekit
