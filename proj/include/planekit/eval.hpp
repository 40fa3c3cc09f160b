#pragma once

// Scene-wise accuracy / completion / precision / recall / F-score and
// planar-wise fidelity / completion / chamfer on the largest planes.

#include "planekit/common.hpp"
#include "planekit/mesh.hpp"
#include "planekit/parallel.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace planekit {

struct SampledCloud {
  enum class Source { MeshArea, Vertices };
  Points3 points;
  Source source = Source::MeshArea;
};

/// n points, faces chosen with probability proportional to area, uniform
/// barycentric position inside the face. Throws on a zero-area mesh (n > 0).
SampledCloud sample_mesh(const TriMesh& mesh, std::size_t n, std::uint64_t seed);
SampledCloud vertex_cloud(const TriMesh& mesh);

struct SceneMetrics {
  double acc = 0.0;
  double comp = 0.0;
  double prec = 0.0;
  double recall = 0.0;
  double fscore = 0.0;
};

inline constexpr double kDefaultTau = 0.05;

/// Nearest neighbours through PointGrid; sums are taken in index order so
/// the result does not depend on the thread count.
SceneMetrics scene_metrics(std::span<const Vec3> pred, std::span<const Vec3> gt, double tau = kDefaultTau,
                           Exec exec = Exec::Parallel);

struct PlanarEvalParams {
  int k = 20;                        ///< largest planes evaluated; <= 0 means all
  std::size_t samples_per_plane = 10000;
  std::size_t pred_samples = 200000;
  double delta = kDefaultDelta;      ///< pred points within 3 delta of a plane count for its fidelity
  std::uint64_t seed = 0;
};

struct PlaneScore {
  int plane_id = 0;
  double area = 0.0;
  double fidelity = 0.0;    ///< cm; NaN when no prediction lies near the plane
  double completion = 0.0;  ///< cm
  double chamfer = 0.0;     ///< cm
};

struct PlanarMetrics {
  double fidelity = 0.0;  ///< cm, mean over planes with a defined fidelity
  double completion = 0.0;
  double chamfer = 0.0;
  std::vector<PlaneScore> planes;
};

/// GT plane regions are the faces whose three vertices share a label.
/// Distances are measured to the surfaces (point-to-triangle): pred samples
/// to the GT region for fidelity, GT region samples to the pred mesh for
/// completion.
PlanarMetrics planar_metrics(const TriMesh& pred, const TriMesh& gt, const PlanarEvalParams& params,
                             Exec exec = Exec::Parallel);

/// Fixed-order one-line CSV (header + values) used by the CLI.
std::string metrics_csv_header();
std::string metrics_csv_row(const SceneMetrics& scene, const PlanarMetrics& planar);

}  // namespace planekit
