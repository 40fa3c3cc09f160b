#pragma once

// Supportive plane correction: rebuild a supporting plane to its full
// extent, fill object contact holes, split resting objects off and seal
// their contact boundaries.

#include "planekit/common.hpp"
#include "planekit/geom2d.hpp"
#include "planekit/mesh.hpp"
#include "planekit/mesh_refine.hpp"
#include "planekit/plane_param.hpp"

#include <vector>

namespace planekit {

enum class LoopKind { Outer, Hole };

struct BoundaryLoop {
  std::vector<int> vertices;  ///< closed cycle, in face edge order
  LoopKind kind = LoopKind::Hole;
  double area = 0.0;          ///< signed area in the classification frame
};

/// Border loops of the faces lying entirely inside the cluster. Warns when
/// a vertex has more than two border edges (loops are then split by angle).
std::vector<BoundaryLoop> extract_loops(const TriMesh& mesh, const PlaneVertexCluster& cluster);

/// The loop with the largest absolute projected area is Outer, the others
/// are Hole.
void classify_loops(std::vector<BoundaryLoop>& loops, const TriMesh& mesh, const PlaneFrame& frame);

/// Adds to the cluster the vertices enclosed by Hole loops when all of them
/// lie within `tolerance` of the plane (isolated drop-outs of the vertex
/// assignment rather than resting objects). Returns the number added.
std::size_t absorb_flat_holes(const TriMesh& mesh, PlaneVertexCluster& cluster, const PlaneEq& plane, double tolerance);

/// Removes cluster vertices whose incident cluster faces do not form one
/// edge-connected fan (boundary pinches and isolated vertices), repeatedly.
/// Returns the number removed.
std::size_t prune_pinches(const TriMesh& mesh, PlaneVertexCluster& cluster);

enum class SupportExtent { OuterLoop, Mer };

/// Re-meshes the supportive plane (after absorb_flat_holes with a 3 delta
/// tolerance and prune_pinches): holes are filled (their loop vertices are
/// left out of the triangulation) and grid points are kept over the whole
/// outer loop (or the whole enclosing rectangle). Patch vertices get the
/// cluster's plane id; other labels are kept (kNoPlane when the input has
/// none), so several planes can be corrected in turn. Throws InvalidArgument when no loop exists.
TriMesh correct_supportive_plane(const TriMesh& mesh, const PlaneVertexCluster& cluster, const PlaneBasis& basis,
                                 const RefineParams& params, SupportExtent extent = SupportExtent::OuterLoop,
                                 RegionReport* report = nullptr);

struct DetachResult {
  TriMesh scene;
  std::vector<TriMesh> objects;
};

/// A patch face has all three vertices labelled with a supportive plane.
/// Components that carry supportive labels but no patch face are the
/// objects resting on the corrected planes; everything else stays in the
/// scene. Objects touching two supportive planes are kept as objects with a
/// warning.
DetachResult detach_object(const TriMesh& mesh, const std::vector<int>& supportive_ids);

struct SealReport {
  std::size_t loops_sealed = 0;
  std::size_t loops_skipped = 0;
  std::size_t cap_faces = 0;
};

/// Caps every open boundary loop whose vertices all lie within 1.5 delta of
/// the plane: vertices are projected, convex loops get a centroid fan and
/// others ear clipping; caps face -plane.normal.
TriMesh seal_contact(const TriMesh& object, const PlaneEq& plane, double delta, SealReport* report = nullptr);

/// Ear clipping of a simple polygon given counter-clockwise.
std::vector<std::array<int, 3>> ear_clip(const Points2& polygon);

}  // namespace planekit
