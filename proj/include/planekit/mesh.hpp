#pragma once

// Indexed triangle mesh with optional per-vertex plane labels, plus the
// topology helpers shared by refinement, correction and evaluation.

#include "planekit/common.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace planekit {

using Face = std::array<int, 3>;

inline constexpr int kNoPlane = -1;

struct TriMesh {
  Points3 vertices;
  std::vector<Face> faces;
  std::vector<int> plane_id;  ///< empty, or one label per vertex (kNoPlane for none)

  bool has_labels() const { return !plane_id.empty(); }
  int label(int v) const { return plane_id.empty() ? kNoPlane : plane_id[v]; }
  /// Index range, repeated indices and label count.
  void validate() const;
};

/// Unnormalized face normal (twice the area vector).
Vec3 face_normal(const TriMesh& mesh, int f);
double face_area(const TriMesh& mesh, int f);
double surface_area(const TriMesh& mesh);

inline std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
}

/// Sorted, de-duplicated vertex neighbours through face edges.
std::vector<std::vector<int>> vertex_neighbors(const TriMesh& mesh);

/// Directed edges (as they appear in faces) whose undirected edge belongs to
/// exactly one face of `faces`.
std::vector<std::array<int, 2>> open_edges(std::span<const Face> faces);

/// Closed loops of directed edges. Where a vertex has several outgoing
/// edges, the walk takes the most counter-clockwise turn in the frame
/// given by `normal` (pass zero to use the lowest index).
std::vector<std::vector<int>> chain_loops(const std::vector<std::array<int, 2>>& edges, const Points3& vertices,
                                          const Vec3& normal, bool* non_manifold = nullptr);

/// Connected components through faces; isolated vertices form their own
/// component. Component ids follow the smallest vertex index.
std::vector<int> connected_components(const TriMesh& mesh, int* count = nullptr);

/// Drops unreferenced vertices; `remap` (optional) receives old -> new or -1.
TriMesh compact(const TriMesh& mesh, std::vector<int>* remap = nullptr);

/// Sub-mesh made of the given faces (vertices compacted).
TriMesh extract_faces(const TriMesh& mesh, std::span<const int> faces);

/// Concatenation; labels are kept when both meshes carry them.
TriMesh merge_meshes(const TriMesh& a, const TriMesh& b);

double mean_edge_length(const TriMesh& mesh);

/// V - E + F.
long euler_characteristic(const TriMesh& mesh);

}  // namespace planekit
