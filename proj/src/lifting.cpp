#include "planekit/lifting.hpp"

#include "planekit/perception.hpp"
#include "planekit/random.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace planekit {

void CameraView::validate() const {
  camera.validate();
  if (plane_mask.width != camera.width || plane_mask.height != camera.height) {
    throw Error(ErrorCode::DimensionMismatch, "plane mask size differs from camera size");
  }
  if (depth && (depth->width != camera.width || depth->height != camera.height)) {
    throw Error(ErrorCode::DimensionMismatch, "depth map size differs from camera size");
  }
}

std::uint64_t CoplanarityGraph::key(int i, int j) {
  if (i > j) std::swap(i, j);
  return (std::uint64_t(std::uint32_t(i)) << 32) | std::uint32_t(j);
}

void CoplanarityGraph::increment(int i, int j, std::uint32_t by) {
  if (i == j) return;
  if (i < 0 || j < 0 || std::size_t(i) >= node_count_ || std::size_t(j) >= node_count_) {
    throw Error(ErrorCode::InvalidArgument, "graph node out of range");
  }
  edges_[key(i, j)] += by;
}

std::uint32_t CoplanarityGraph::weight(int i, int j) const {
  if (i == j) return 0;
  auto it = edges_.find(key(i, j));
  return it == edges_.end() ? 0 : it->second;
}

std::vector<WeightedEdge> CoplanarityGraph::sorted_edges() const {
  std::vector<std::pair<std::uint64_t, std::uint32_t>> raw(edges_.begin(), edges_.end());
  std::sort(raw.begin(), raw.end());
  std::vector<WeightedEdge> out;
  out.reserve(raw.size());
  for (const auto& [k, w] : raw) out.push_back({int(k >> 32), int(k & 0xffffffffu), double(w)});
  return out;
}

WeightedGraph CoplanarityGraph::to_weighted() const { return WeightedGraph(int(node_count_), sorted_edges()); }

void PlanePartition::rebuild_clusters() {
  int max_id = -1;
  for (int c : cluster_of) max_id = std::max(max_id, c);
  clusters.assign(std::size_t(max_id + 1), {});
  for (std::size_t v = 0; v < cluster_of.size(); ++v) {
    if (cluster_of[v] >= 0) clusters[cluster_of[v]].push_back(int(v));
  }
}

std::vector<Projection> project_points(std::span<const Vec3> points, const Camera& camera, Exec exec) {
  std::vector<Projection> out(points.size());
  const std::int64_t n = std::int64_t(points.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) out[i] = project_point(points[i], camera);
  } else {
    for (std::int64_t i = 0; i < n; ++i) out[i] = project_point(points[i], camera);
  }
  return out;
}

std::vector<int> occlusion_filter(std::span<const double> depths, std::uint64_t seed) {
  std::vector<int> all(depths.size());
  std::iota(all.begin(), all.end(), 0);
  if (depths.size() < 2) return all;
  const KMeansResult km = kmeans(depths, 1, 2, seed);
  const double c0 = km.centroid(0, 0);
  const double c1 = km.centroid(1, 0);
  const double near = std::min(c0, c1);
  if (std::abs(c0 - c1) < 0.05 * near) return all;
  const int keep = c0 <= c1 ? 0 : 1;
  std::vector<int> kept;
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (km.assignment[i] == keep) kept.push_back(int(i));
  }
  return kept;
}

namespace {

// Farthest visible surface around the pixel (3x3 window).
double local_max_depth(const DepthMap& depth, int x, int y) {
  double m = 0.0;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      const int xx = x + dx, yy = y + dy;
      if (xx < 0 || yy < 0 || xx >= depth.width || yy >= depth.height) continue;
      m = std::max(m, double(depth.at(xx, yy)));
    }
  }
  return m;
}

}  // namespace

std::vector<std::vector<int>> instance_point_sets(std::span<const Vec3> points, const CameraView& view,
                                                  const LiftingParams& params, std::uint64_t seed) {
  const int width = view.camera.width;
  const int instances = view.plane_mask.max_label();
  std::vector<std::vector<int>> groups(std::size_t(instances) + 1);
  std::vector<std::vector<double>> depths(std::size_t(instances) + 1);
  std::vector<std::vector<int>> pixels(std::size_t(instances) + 1);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Projection pr = project_point(points[i], view.camera);
    if (!pr.in_frustum) continue;
    const int pix = pr.pixel_index(width);
    const int label = view.plane_mask.labels[pix];
    if (label <= 0) continue;
    groups[label].push_back(int(i));
    depths[label].push_back(pr.depth);
    pixels[label].push_back(pix);
  }

  const bool use_depth = params.occlusion == OcclusionMode::DepthMap ||
                         (params.occlusion == OcclusionMode::Auto && view.depth.has_value());
  if (params.occlusion == OcclusionMode::DepthMap && !view.depth) {
    throw Error(ErrorCode::InvalidArgument, "depth-map occlusion requested for a view without depth");
  }

  for (int label = 1; label <= instances; ++label) {
    auto& g = groups[label];
    if (g.empty()) continue;
    std::vector<int> kept;
    if (use_depth) {
      for (std::size_t k = 0; k < g.size(); ++k) {
        const int pix = pixels[label][k];
        const double limit = local_max_depth(*view.depth, pix % width, pix / width);
        if (limit > 0.0 && depths[label][k] <= limit + params.depth_tolerance) kept.push_back(g[k]);
      }
    } else {
      for (int local : occlusion_filter(depths[label], derive_seed(seed, std::uint64_t(label)))) {
        kept.push_back(g[local]);
      }
    }
    if (kept.size() > params.max_instance_points) {
      Rng rng(derive_seed(seed, 0x5eedULL + std::uint64_t(label)));
      for (std::size_t k = 0; k < params.max_instance_points; ++k) {
        std::swap(kept[k], kept[k + uniform_index(rng, kept.size() - k)]);
      }
      kept.resize(params.max_instance_points);
    }
    std::sort(kept.begin(), kept.end());
    g = std::move(kept);
  }
  return groups;
}

void accumulate_edges(CoplanarityGraph& graph, std::span<const CameraView> views, std::span<const Vec3> points,
                      const LiftingParams& params, std::uint64_t seed, Exec exec) {
  if (graph.node_count() != points.size()) {
    throw Error(ErrorCode::DimensionMismatch, "graph node count differs from point count");
  }
  for (const auto& v : views) v.validate();
  const std::int64_t n_views = std::int64_t(views.size());
  std::vector<std::vector<std::vector<int>>> per_view(views.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t v = 0; v < n_views; ++v) {
      per_view[v] = instance_point_sets(points, views[v], params, derive_seed(seed, std::uint64_t(v)));
    }
  } else {
    for (std::int64_t v = 0; v < n_views; ++v) {
      per_view[v] = instance_point_sets(points, views[v], params, derive_seed(seed, std::uint64_t(v)));
    }
  }
  // serialized reduction; the result is independent of view order
  for (const auto& groups : per_view) {
    for (const auto& g : groups) {
      for (std::size_t a = 0; a < g.size(); ++a) {
        for (std::size_t b = a + 1; b < g.size(); ++b) graph.increment(g[a], g[b]);
      }
    }
  }
}

PlanePartition leiden_partition(const CoplanarityGraph& graph, std::uint64_t seed, double resolution,
                                std::vector<double>* quality_trace) {
  PlanePartition out;
  out.cluster_of.assign(graph.node_count(), kUnclustered);
  if (graph.edge_count() == 0) return out;

  const WeightedGraph wg = graph.to_weighted();
  LeidenResult lr = leiden(wg, seed, resolution);
  if (quality_trace) *quality_trace = lr.quality_trace;

  std::vector<int> size(lr.community_count, 0);
  std::vector<int> first(lr.community_count, -1);
  for (int v = 0; v < wg.node_count(); ++v) {
    if (wg.degree(v) <= 0.0) continue;
    const int c = lr.membership[v];
    ++size[c];
    if (first[c] < 0) first[c] = v;
  }
  std::vector<int> order;
  for (int c = 0; c < lr.community_count; ++c) {
    if (size[c] > 0) order.push_back(c);
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (size[a] != size[b]) return size[a] > size[b];
    return first[a] < first[b];
  });
  std::vector<int> rank(lr.community_count, kUnclustered);
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = int(r);
  for (int v = 0; v < wg.node_count(); ++v) {
    if (wg.degree(v) > 0.0) out.cluster_of[v] = rank[lr.membership[v]];
  }
  out.rebuild_clusters();
  return out;
}

PlanePartition lift_scene(std::span<const Vec3> points, std::span<const CameraView> views,
                          const LiftingParams& params, std::uint64_t seed, Exec exec,
                          std::vector<double>* quality_trace) {
  CoplanarityGraph graph(points.size());
  accumulate_edges(graph, views, points, params, seed, exec);
  PlanePartition part = leiden_partition(graph, derive_seed(seed, 0x1e1dULL), params.resolution, quality_trace);
  // demote small clusters; clusters stay sorted by size so ids remain dense
  for (int& c : part.cluster_of) {
    if (c >= 0 && part.clusters[c].size() < params.min_cluster_size) c = kUnclustered;
  }
  part.rebuild_clusters();
  return part;
}

}  // namespace planekit
