#pragma once

// Lifting per-view plane masks onto a point cloud: projection, occlusion
// filtering, co-planarity graph accumulation and clustering.

#include "planekit/camera.hpp"
#include "planekit/common.hpp"
#include "planekit/image.hpp"
#include "planekit/leiden.hpp"
#include "planekit/parallel.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace planekit {

struct CameraView {
  Camera camera;
  std::optional<DepthMap> depth;
  PlaneMaskImage plane_mask;

  void validate() const;
};

/// Co-occurrence counts between scene points. Stored once per unordered pair.
class CoplanarityGraph {
 public:
  explicit CoplanarityGraph(std::size_t node_count = 0) : node_count_(node_count) {}

  std::size_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }

  void increment(int i, int j, std::uint32_t by = 1);
  std::uint32_t weight(int i, int j) const;

  /// All edges sorted by (u, v), u < v.
  std::vector<WeightedEdge> sorted_edges() const;
  WeightedGraph to_weighted() const;

 private:
  static std::uint64_t key(int i, int j);
  std::size_t node_count_;
  std::unordered_map<std::uint64_t, std::uint32_t> edges_;
};

inline constexpr int kUnclustered = -1;

struct PlanePartition {
  std::vector<int> cluster_of;           ///< per node, kUnclustered for none
  std::vector<std::vector<int>> clusters;

  /// Rebuilds `clusters` from `cluster_of`.
  void rebuild_clusters();
};

std::vector<Projection> project_points(std::span<const Vec3> points, const Camera& camera,
                                       Exec exec = Exec::Parallel);

/// K-means (k = 2) depth split: keeps the nearer cluster unless the two
/// centroids lie within 5% of the nearer one. Returns kept positions into
/// `depths`, ascending.
std::vector<int> occlusion_filter(std::span<const double> depths, std::uint64_t seed);

enum class OcclusionMode {
  Auto,      ///< depth-map test when the view has depth, k-means otherwise
  DepthMap,
  KMeans,
};

struct LiftingParams {
  OcclusionMode occlusion = OcclusionMode::Auto;
  double depth_tolerance = 3.0 * kDefaultDelta;
  std::size_t max_instance_points = 2000;
  std::size_t min_cluster_size = 30;
  double resolution = 1.0;
};

/// Points visible on one plane instance of one view, after occlusion
/// filtering and subsampling. Indexed by instance label.
std::vector<std::vector<int>> instance_point_sets(std::span<const Vec3> points, const CameraView& view,
                                                  const LiftingParams& params, std::uint64_t seed);

void accumulate_edges(CoplanarityGraph& graph, std::span<const CameraView> views, std::span<const Vec3> points,
                      const LiftingParams& params, std::uint64_t seed, Exec exec = Exec::Parallel);

/// Leiden on the co-planarity graph; nodes without edges are unclustered.
/// Clusters are ordered by size (descending), ties by smallest node.
PlanePartition leiden_partition(const CoplanarityGraph& graph, std::uint64_t seed, double resolution = 1.0,
                                std::vector<double>* quality_trace = nullptr);

/// Graph accumulation, Leiden, then clusters below min_cluster_size are
/// demoted to unclustered. `quality_trace` receives the modularity trace.
PlanePartition lift_scene(std::span<const Vec3> points, std::span<const CameraView> views,
                          const LiftingParams& params, std::uint64_t seed, Exec exec = Exec::Parallel,
                          std::vector<double>* quality_trace = nullptr);

}  // namespace planekit
