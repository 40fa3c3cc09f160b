#pragma once

// File formats (PFM, PGM, PLY, OBJ, camera text, plane JSON) and the
// manifest-driven scene directory.

#include "planekit/camera.hpp"
#include "planekit/common.hpp"
#include "planekit/image.hpp"
#include "planekit/mesh.hpp"
#include "planekit/plane_param.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace planekit {

namespace fs = std::filesystem;

// --- images ---------------------------------------------------------------

/// Colour PFM ("PF", little-endian, rows stored bottom-up).
void write_pfm(const fs::path& path, const NormalMap& normals);
NormalMap read_normal_pfm(const fs::path& path);
/// Greyscale PFM ("Pf").
void write_pfm(const fs::path& path, const DepthMap& depth);
DepthMap read_depth_pfm(const fs::path& path);

/// Binary 16-bit PGM ("P5", maxval 65535). Labels must lie in [0, 65535].
void write_pgm(const fs::path& path, const LabelImage& labels);
/// Accepts 8- and 16-bit binary PGM.
LabelImage read_pgm(const fs::path& path);

// --- PLY / OBJ -----------------------------------------------------------

enum class MeshFormat { PlyBinary, PlyAscii, Obj };

/// Vertex element as double columns keyed by property name, plus faces.
struct PlyData {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  std::vector<Face> faces;

  std::size_t vertex_count() const { return columns.empty() ? 0 : columns[0].size(); }
  const std::vector<double>* column(const std::string& name) const;
};

/// Reads ASCII and binary little-endian PLY. Faces must be triangles.
PlyData read_ply(const fs::path& path);

/// Vertices are written as doubles; `plane_id` is written when labelled.
void save_mesh(const TriMesh& mesh, const fs::path& path, MeshFormat format = MeshFormat::PlyBinary);
/// Format from the extension (.ply or .obj).
TriMesh load_mesh(const fs::path& path);

/// Point cloud with optional integer columns (e.g. plane_id, cluster).
struct PointCloud {
  Points3 points;
  std::map<std::string, std::vector<int>> labels;
};

void save_cloud(const PointCloud& cloud, const fs::path& path, MeshFormat format = MeshFormat::PlyBinary);
/// Requires x, y, z (float or double); every other property becomes an
/// integer label column.
PointCloud load_cloud(const fs::path& path);

// --- cameras and planes ----------------------------------------------------

/// One line per view: fx fy cx cy r00 .. r22 tx ty tz width height.
void write_cameras(const fs::path& path, const std::vector<Camera>& cameras);
std::vector<Camera> read_cameras(const fs::path& path);

/// A fitted plane: equation, basis points and the cluster it came from.
struct PlaneRecord {
  int id = 0;
  PlaneEq plane;
  PlaneBasis basis;
  std::size_t support = 0;  ///< cluster size
  std::size_t inliers = 0;
};

void write_planes(const fs::path& path, const std::vector<PlaneRecord>& planes);
std::vector<PlaneRecord> read_planes(const fs::path& path);

// --- scene directory -------------------------------------------------------

struct ViewFiles {
  std::string normal;     ///< PFM normal map
  std::string depth;      ///< PFM depth map
  std::string instances;  ///< PGM mask proposals (instance id + 1)
  std::string planes;     ///< PGM per-view plane labels (after detection)
};

struct SceneManifest {
  double alpha = kDefaultAlpha;
  int sigma = kDefaultSigma;
  double delta = kDefaultDelta;
  std::optional<double> grid_spacing;
  std::map<std::string, std::uint64_t> seeds;
  std::string cameras;
  std::vector<ViewFiles> views;
  /// Named artifacts: cloud, partition, planes, gt_mesh, mesh, refined_mesh, ...
  std::map<std::string, std::string> files;
};

inline constexpr const char* kManifestName = "manifest.json";

void save_manifest(const fs::path& dir, const SceneManifest& manifest);
/// Parses and schema-checks the manifest and verifies that every referenced
/// file exists.
SceneManifest load_manifest(const fs::path& dir);

struct ViewData {
  Camera camera;
  std::optional<NormalMap> normals;
  std::optional<DepthMap> depth;
  std::optional<LabelImage> instances;
  std::optional<PlaneMaskImage> planes;
};

struct SceneBundle {
  fs::path dir;
  SceneManifest manifest;
  std::vector<ViewData> views;
  std::optional<PointCloud> cloud;
  std::optional<PointCloud> partition;  ///< cloud with a `cluster` column
  std::optional<std::vector<PlaneRecord>> planes;
  std::map<std::string, TriMesh> meshes;  ///< every *_mesh artifact
};

/// Loads every referenced artifact and cross-checks sizes (per-view image
/// sizes against the camera, label columns against the cloud length).
SceneBundle load_scene(const fs::path& dir);

}  // namespace planekit
