#pragma once

// Replaces dense planar mesh regions with flat, regularly gridded,
// Delaunay-connected patches.

#include "planekit/common.hpp"
#include "planekit/geom2d.hpp"
#include "planekit/mesh.hpp"
#include "planekit/parallel.hpp"
#include "planekit/plane_param.hpp"

#include <optional>
#include <span>
#include <vector>

namespace planekit {

struct PlaneVertexCluster {
  int plane_id = 0;
  std::vector<int> vertices;  ///< sorted
  std::vector<int> boundary;  ///< sorted subset with an edge leaving the cluster
  std::vector<int> interior;  ///< sorted remainder
};

/// Vertex v joins plane A iff some point of A lies closer than 1.5 delta and
/// every point of every other plane lies farther than 0.5 delta. When that
/// holds for several planes the one with the nearest point wins (ties: lower
/// index). Returns one cluster per entry of `plane_points` (plane_id = index),
/// membership only.
std::vector<PlaneVertexCluster> assign_vertices(const TriMesh& mesh, const std::vector<Points3>& plane_points,
                                                double delta, Exec exec = Exec::Parallel);

/// Fills boundary / interior from the mesh edges.
PlaneVertexCluster classify_boundary_interior(const TriMesh& mesh, PlaneVertexCluster cluster);

/// Drops faces whose three vertices are in the cluster; vertices are kept.
TriMesh remove_planar_faces(const TriMesh& mesh, const PlaneVertexCluster& cluster);

struct RefineParams {
  double delta = kDefaultDelta;
  std::optional<double> grid_spacing;  ///< default: max(4 delta, longer MER side / 64)
  std::optional<double> stamp_radius;  ///< default: max(1.5 delta, median cluster edge length)

  void validate() const;
};

double default_grid_spacing(double delta, double mer_long_side);

struct RegionReport {
  int plane_id = 0;
  bool skipped = false;
  std::size_t removed_faces = 0;
  std::size_t deleted_vertices = 0;
  std::size_t boundary_vertices = 0;
  std::size_t grid_vertices = 0;
  std::size_t new_faces = 0;
  double grid_spacing = 0.0;
};

/// Re-meshes one planar region. The output is compacted; vertex labels are
/// the plane id for the patch and kNoPlane elsewhere (input labels are
/// replaced).
TriMesh refine_plane_region(const TriMesh& mesh, const PlaneVertexCluster& cluster, const PlaneBasis& basis,
                            const RefineParams& params, RegionReport* report = nullptr);

struct PlaneRegion {
  PlaneVertexCluster cluster;
  PlaneBasis basis;
};

/// Refines every region in descending cluster size (ties: lower plane id).
/// Regions that fail are skipped with a warning. Output labels as above.
TriMesh refine_mesh(const TriMesh& mesh, std::vector<PlaneRegion> regions, const RefineParams& params,
                    std::vector<RegionReport>* reports = nullptr);

/// Number of vertices carrying a plane label.
std::size_t planar_vertex_count(const TriMesh& mesh);

/// Groups labelled points by label in [0, plane_count); other labels are
/// ignored.
std::vector<Points3> plane_point_sets(std::span<const Vec3> points, std::span<const int> labels, int plane_count);

/// Labels dense points from a sparse labelled cloud: among the labels of
/// sparse points within `radius` (the nearest one if none), take the plane
/// whose equation is closest, provided it is within `max_plane_distance`.
/// Unlabelled results are -1.
std::vector<int> propagate_labels(std::span<const Vec3> dense, std::span<const Vec3> sparse,
                                  std::span<const int> sparse_labels, std::span<const PlaneEq> planes, double radius,
                                  double max_plane_distance, Exec exec = Exec::Parallel);

// --- shared with supportive plane correction ---------------------------------

enum class PatchExtent {
  Occupancy,  ///< grid points and triangles must fall in occupied cells
  Rect,       ///< keep everything inside the enclosing rectangle
  Polygon,    ///< keep grid points / triangles inside `clip_loop` (triangles also need occupancy)
};

struct PatchPolicy {
  PatchExtent extent = PatchExtent::Occupancy;
  std::vector<int> clip_loop;                ///< vertex ids of the clipping polygon
  std::vector<std::vector<int>> fill_loops;  ///< excluded from triangulation; areas inside are always filled
};

/// In-place re-meshing of one region of `work`, whose labels must be
/// present. Vertex ids stay stable: new vertices are appended, replaced
/// faces erased and deleted vertices simply left unreferenced (compact()
/// removes them). Returns false (mesh untouched) when the region is skipped.
bool remesh_region(TriMesh& work, const PlaneVertexCluster& cluster, const PlaneEq& plane, const RefineParams& params,
                   const PatchPolicy& policy, RegionReport* report = nullptr);

}  // namespace planekit
