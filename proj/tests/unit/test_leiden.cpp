#include "planekit/leiden.hpp"
#include "planekit/random.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <queue>

using namespace planekit;

namespace {

// Q from the dense adjacency matrix.
double modularity_dense(int n, const std::vector<WeightedEdge>& edges, const std::vector<int>& c, double gamma) {
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (const auto& e : edges) {
    if (e.u == e.v) {
      a[e.u][e.u] += e.weight;
    } else {
      a[e.u][e.v] += e.weight;
      a[e.v][e.u] += e.weight;
    }
  }
  std::vector<double> k(n, 0.0);
  double m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) k[i] += a[i][j];
    m2 += k[i];
  }
  double q = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (c[i] >= 0 && c[i] == c[j]) q += a[i][j] - gamma * k[i] * k[j] / m2;
    }
  }
  return q / m2;
}

double choose2(double x) { return 0.5 * x * (x - 1.0); }

double adjusted_rand(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<std::pair<int, int>, double> nij;
  std::map<int, double> ai, bj;
  for (std::size_t i = 0; i < a.size(); ++i) {
    nij[{a[i], b[i]}] += 1;
    ai[a[i]] += 1;
    bj[b[i]] += 1;
  }
  double index = 0, sa = 0, sb = 0;
  for (const auto& [k, v] : nij) index += choose2(v);
  for (const auto& [k, v] : ai) sa += choose2(v);
  for (const auto& [k, v] : bj) sb += choose2(v);
  const double expected = sa * sb / choose2(double(a.size()));
  return (index - expected) / (0.5 * (sa + sb) - expected);
}

std::vector<WeightedEdge> planted(int groups, int size, double p_in, double p_out, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<WeightedEdge> e;
  const int n = groups * size;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (uniform01(rng) < (i / size == j / size ? p_in : p_out)) e.push_back({i, j, 1.0});
    }
  }
  return e;
}

bool connected_within(const WeightedGraph& g, const std::vector<int>& c, int community) {
  std::vector<int> nodes;
  for (int i = 0; i < g.node_count(); ++i) {
    if (c[i] == community) nodes.push_back(i);
  }
  if (nodes.empty()) return true;
  std::vector<char> seen(g.node_count(), 0);
  std::queue<int> q;
  q.push(nodes[0]);
  seen[nodes[0]] = 1;
  std::size_t reached = 0;
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    ++reached;
    for (auto e = g.begin(v); e < g.end(v); ++e) {
      const int w = g.target(e);
      if (c[w] == community && !seen[w]) {
        seen[w] = 1;
        q.push(w);
      }
    }
  }
  return reached == nodes.size();
}

}  // namespace

TEST_CASE("modularity equals the dense formula") {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 30;
    std::vector<WeightedEdge> edges;
    for (int k = 0; k < 80; ++k) {
      edges.push_back({int(uniform_index(rng, n)), int(uniform_index(rng, n)), 0.5 + uniform01(rng)});
    }
    std::vector<int> c(n);
    for (int& x : c) x = int(uniform_index(rng, 4));
    const WeightedGraph g(n, edges);
    for (double gamma : {0.5, 1.0, 2.0}) {
      CHECK(modularity(g, c, gamma) == doctest::Approx(modularity_dense(n, edges, c, gamma)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(modularity(WeightedGraph(3, {}), {0, 0, 0}), Error);
}

TEST_CASE("leiden recovers planted partitions") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto edges = planted(4, 30, 0.4, 0.02, seed);
    const WeightedGraph g(120, edges);
    const LeidenResult r = leiden(g, seed);
    std::vector<int> truth(120);
    for (int i = 0; i < 120; ++i) truth[i] = i / 30;
    CHECK(adjusted_rand(r.membership, truth) >= 0.95);
    for (std::size_t i = 1; i < r.quality_trace.size(); ++i) CHECK(r.quality_trace[i] >= r.quality_trace[i - 1] - 1e-12);
    for (int c = 0; c < r.community_count; ++c) CHECK(connected_within(g, r.membership, c));
    CHECK(leiden(g, seed).membership == r.membership);
  }
}

TEST_CASE("two cliques joined by one edge") {
  std::vector<WeightedEdge> e;
  for (int base : {0, 5}) {
    for (int i = 0; i < 5; ++i) {
      for (int j = i + 1; j < 5; ++j) e.push_back({base + i, base + j, 1.0});
    }
  }
  e.push_back({4, 5, 1.0});
  const LeidenResult r = leiden(WeightedGraph(10, e), 3);
  CHECK(r.community_count == 2);
  CHECK(r.membership[0] != r.membership[9]);
}

TEST_CASE("aggregation preserves total weight") {
  const WeightedGraph g(4, {{0, 1, 1.0}, {1, 2, 2.0}, {2, 3, 3.0}, {3, 3, 0.5}});
  const WeightedGraph a = g.aggregate({0, 0, 1, 1}, 2);
  CHECK(a.total_weight() == doctest::Approx(g.total_weight()));
  CHECK(a.node_count() == 2);
  std::vector<int> labels{5, 5, -1, 2};
  CHECK(compact_labels(labels) == 2);
  CHECK(labels == std::vector<int>{0, 0, -1, 1});
}
