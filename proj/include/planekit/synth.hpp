#pragma once

// Synthetic box rooms with optional furniture: ground-truth meshes, plane
// labels, surface samples, analytic renders and perturbed dense meshes.

#include "planekit/camera.hpp"
#include "planekit/common.hpp"
#include "planekit/image.hpp"
#include "planekit/mesh.hpp"
#include "planekit/plane_param.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace planekit {

/// Axis-aligned rectangle {origin + s*du + t*dv : s, t in [0, 1]} with
/// normal du x dv.
struct Rect3 {
  Vec3 origin = Vec3::Zero();
  Vec3 du = Vec3::UnitX();
  Vec3 dv = Vec3::UnitY();
  int plane_id = 0;

  Vec3 normal() const { return du.cross(dv).normalized(); }
  double area() const { return du.cross(dv).norm(); }
  Vec3 at(double s, double t) const { return origin + s * du + t * dv; }
};

struct BoxSpec {
  Vec3 size{0.2, 0.2, 0.2};
  Vec2 center{0.0, 0.0};  ///< footprint centre (x, y)
};

struct SceneSpec {
  Vec3 room{4.0, 4.0, 3.0};  ///< full extents; the floor is centred at the origin, z in [0, room.z]

  bool table = false;
  Vec2 table_center{0.3, 0.2};
  Vec2 table_size{1.2, 0.8};
  double table_height = 0.75;
  double table_thickness = 0.04;
  double leg_size = 0.05;
  double leg_inset = 0.05;

  /// Boxes rest on the table top when there is a table, on the floor otherwise.
  std::vector<BoxSpec> boxes;

  int views = 24;
  int width = 320;
  int height = 240;
  double focal = 256.0;
  double ring_radius = 1.2;
  double ring_height = 1.5;
  double target_height = 1.5;
  double target_swing = 0.4;  ///< look-at height alternates between target_height -/+ swing

  void validate() const;

  static SceneSpec empty_room();
  /// Room, table and `boxes` boxes on the table top.
  static SceneSpec desk_with_boxes(int boxes);
};

struct GtPlane {
  int id = 0;
  PlaneEq plane;  ///< oriented with the surface normal (not canonicalized)
  std::string name;
  double area = 0.0;
};

struct SynthScene {
  SceneSpec spec;
  std::vector<Rect3> rects;  ///< hole-free decomposition of every surface
  std::vector<GtPlane> planes;
  TriMesh gt_mesh;           ///< two triangles per rect, unwelded, labelled
  std::vector<Camera> cameras;
};

SynthScene build_scene(const SceneSpec& spec);

struct LabeledCloud {
  Points3 points;
  std::vector<int> labels;
};

/// Area-weighted uniform samples with their plane labels.
LabeledCloud sample_surface(const SynthScene& scene, std::size_t count, std::uint64_t seed);
/// Jittered-stratified samples at roughly `spacing` (one per cell).
LabeledCloud sample_surface_stratified(const SynthScene& scene, double spacing, std::uint64_t seed);

struct RenderOptions {
  double normal_kappa = 0.0;  ///< von Mises-Fisher concentration; 0 disables noise
  int mask_erosion = 0;       ///< pixels removed from every instance border
};

struct RenderedView {
  NormalMap normals;
  DepthMap depth;
  LabelImage instances;            ///< plane id + 1, 0 for misses
  std::vector<double> exact_depth; ///< double-precision z-depth (0 for misses)
};

RenderedView render_view(const SynthScene& scene, const Camera& camera, const RenderOptions& options,
                         std::uint64_t seed);

/// Sample from the von Mises-Fisher distribution around unit `mean`.
Vec3 sample_vmf(const Vec3& mean, double kappa, std::uint64_t seed);

/// Re-tessellates every rect on a shared lattice of pitch `edge_len`, welds
/// coincident vertices and displaces each vertex along its surface normal
/// by N(0, noise_sigma). Vertex labels are the ground-truth plane ids.
TriMesh perturb_dense_mesh(std::span<const Rect3> rects, double edge_len, double noise_sigma, std::uint64_t seed);

/// Vertex count of a regular (n+1) x (m+1) tessellation of one rect.
std::size_t lattice_vertex_count(const Rect3& rect, double edge_len);

}  // namespace planekit
