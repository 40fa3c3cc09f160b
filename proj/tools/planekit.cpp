// planekit command line: synth, detect, lift, fit, refine, spc, eval, info.
// Every stage reads and extends the manifest of one scene directory.

#include "planekit/eval.hpp"
#include "planekit/io.hpp"
#include "planekit/lifting.hpp"
#include "planekit/mesh_refine.hpp"
#include "planekit/parallel.hpp"
#include "planekit/perception.hpp"
#include "planekit/random.hpp"
#include "planekit/reparam_opt.hpp"
#include "planekit/spc.hpp"
#include "planekit/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

using namespace planekit;

namespace {

struct Common {
  double alpha = kDefaultAlpha;
  int sigma = kDefaultSigma;
  double delta = kDefaultDelta;
  std::optional<double> grid_spacing;
  std::uint64_t seed = 0;
  int threads = 0;
  bool quiet = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--alpha", c.alpha, "normal similarity threshold")->capture_default_str();
  app->add_option("--sigma", c.sigma, "minimum plane area in pixels")->capture_default_str();
  app->add_option("--delta", c.delta, "reconstruction resolution (m)")->capture_default_str();
  app->add_option("--grid-spacing", c.grid_spacing, "patch grid spacing (m)");
  app->add_option("--seed", c.seed, "random seed")->capture_default_str();
  app->add_option("--threads", c.threads, "worker threads (0 = default)")->capture_default_str();
  app->add_flag("--quiet", c.quiet, "suppress warnings");
}

std::string view_name(const char* kind, int i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "views/%s_%03d.%s", kind, i, ext);
  return buf;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

const std::vector<int>& label_column(const PointCloud& cloud, const std::string& name, const fs::path& path) {
  const auto it = cloud.labels.find(name);
  if (it == cloud.labels.end()) throw Error(ErrorCode::Schema, path.string() + " lacks a " + name + " column");
  return it->second;
}

std::string require_file(const SceneManifest& m, const std::string& key, const char* stage) {
  const auto it = m.files.find(key);
  if (it == m.files.end()) throw Error(ErrorCode::Schema, std::string("manifest has no ") + key + " (run " + stage + " first)");
  return it->second;
}

// --- synth -----------------------------------------------------------------

struct SynthArgs {
  std::string out;
  int views = 24;
  std::string res = "320x240";
  bool table = false;
  int objects = 0;
  std::size_t cloud_points = 5000;
  double dense_edge = 0.02;
  double dense_noise = 0.002;
  double kappa = 0.0;
  int erosion = 0;
};

void run_synth(const Common& c, const SynthArgs& a) {
  SceneSpec spec = a.table || a.objects > 0 ? SceneSpec::desk_with_boxes(a.objects) : SceneSpec::empty_room();
  spec.views = a.views;
  if (std::sscanf(a.res.c_str(), "%dx%d", &spec.width, &spec.height) != 2) {
    throw Error(ErrorCode::InvalidArgument, "--res must look like 320x240");
  }
  spec.focal = 0.8 * spec.width;
  const SynthScene scene = build_scene(spec);
  const fs::path dir = a.out;
  fs::create_directories(dir / "views");

  SceneManifest m;
  m.alpha = c.alpha;
  m.sigma = c.sigma;
  m.delta = c.delta;
  m.grid_spacing = c.grid_spacing;
  m.seeds["synth"] = c.seed;
  m.cameras = "cameras.txt";
  write_cameras(dir / m.cameras, scene.cameras);
  RenderOptions ro;
  ro.normal_kappa = a.kappa;
  ro.mask_erosion = a.erosion;
  for (int i = 0; i < int(scene.cameras.size()); ++i) {
    const RenderedView r = render_view(scene, scene.cameras[i], ro, derive_seed(c.seed, std::uint64_t(i)));
    ViewFiles f{view_name("normal", i, "pfm"), view_name("depth", i, "pfm"), view_name("instances", i, "pgm"), ""};
    write_pfm(dir / f.normal, r.normals);
    write_pfm(dir / f.depth, r.depth);
    write_pgm(dir / f.instances, r.instances);
    m.views.push_back(f);
  }
  const LabeledCloud samples = sample_surface(scene, a.cloud_points, derive_seed(c.seed, 1000));
  PointCloud cloud{samples.points, {{"plane_id", samples.labels}}};
  save_cloud(cloud, dir / "cloud.ply");
  save_mesh(scene.gt_mesh, dir / "gt_mesh.ply");
  save_mesh(perturb_dense_mesh(scene.rects, a.dense_edge, a.dense_noise, derive_seed(c.seed, 1001)),
            dir / "dense_mesh.ply");
  m.files = {{"cloud", "cloud.ply"}, {"gt_mesh", "gt_mesh.ply"}, {"dense_mesh", "dense_mesh.ply"}};
  save_manifest(dir, m);
  std::printf("planes %zu views %zu cloud %zu\n", scene.planes.size(), scene.cameras.size(), samples.points.size());
  for (const GtPlane& p : scene.planes) std::printf("plane %d %s area %.4f\n", p.id, p.name.c_str(), p.area);
}

// --- detect ----------------------------------------------------------------

void run_detect(const Common& c, const std::string& scene_dir) {
  const fs::path dir = scene_dir;
  SceneManifest m = load_manifest(dir);
  const PerceptionParams params{c.alpha, c.sigma};
  validate(params);
  std::size_t total = 0;
  for (int i = 0; i < int(m.views.size()); ++i) {
    ViewFiles& f = m.views[i];
    if (f.normal.empty() || f.instances.empty()) throw Error(ErrorCode::Schema, "view needs normal and mask files");
    const NormalMap normals = read_normal_pfm(dir / f.normal);
    const LabelImage instances = read_pgm(dir / f.instances);
    if (normals.width != instances.width || normals.height != instances.height) {
      throw Error(ErrorCode::DimensionMismatch, "view " + std::to_string(i) + ": mask size differs from normal map");
    }
    const PlaneMaskImage planes =
        detect_view_planes(normals, masks_from_labels(instances), params, derive_seed(c.seed, std::uint64_t(i)));
    f.planes = view_name("planes", i, "pgm");
    write_pgm(dir / f.planes, planes);
    std::set<int> ids(planes.labels.begin(), planes.labels.end());
    ids.erase(0);
    total += ids.size();
    std::printf("view %d planes %zu\n", i, ids.size());
  }
  m.alpha = c.alpha;
  m.sigma = c.sigma;
  m.seeds["detect"] = c.seed;
  save_manifest(dir, m);
  std::printf("total %zu\n", total);
}

// --- lift ------------------------------------------------------------------

struct LiftArgs {
  std::string scene;
  std::size_t max_instance_points = 300;
  std::size_t min_cluster_size = 30;
  double resolution = 1.0;
};

void run_lift(const Common& c, const LiftArgs& a) {
  const fs::path dir = a.scene;
  SceneManifest m = load_manifest(dir);
  const PointCloud cloud = load_cloud(dir / require_file(m, "cloud", "synth"));
  const auto cams = read_cameras(dir / m.cameras);
  if (cams.size() != m.views.size()) throw Error(ErrorCode::DimensionMismatch, "camera count differs from view count");
  std::vector<CameraView> views;
  for (std::size_t i = 0; i < cams.size(); ++i) {
    const ViewFiles& f = m.views[i];
    if (f.planes.empty()) throw Error(ErrorCode::Schema, "view " + std::to_string(i) + " has no plane mask (run detect first)");
    CameraView v;
    v.camera = cams[i];
    if (!f.depth.empty()) v.depth = read_depth_pfm(dir / f.depth);
    v.plane_mask = read_pgm(dir / f.planes);
    views.push_back(std::move(v));
  }
  LiftingParams lp;
  lp.depth_tolerance = 3.0 * c.delta;
  lp.max_instance_points = a.max_instance_points;
  lp.min_cluster_size = a.min_cluster_size;
  lp.resolution = a.resolution;
  const PlanePartition part = lift_scene(cloud.points, views, lp, c.seed);
  PointCloud out{cloud.points, {{"cluster", part.cluster_of}}};
  save_cloud(out, dir / "partition.ply");
  m.files["partition"] = "partition.ply";
  m.delta = c.delta;
  m.seeds["lift"] = c.seed;
  save_manifest(dir, m);
  std::size_t clustered = 0;
  for (const auto& cl : part.clusters) clustered += cl.size();
  std::printf("clusters %zu clustered %zu of %zu\n", part.clusters.size(), clustered, cloud.points.size());
}

// --- fit -------------------------------------------------------------------

struct FitArgs {
  std::string scene;
  int iterations = 2000;
  double lr_point = 0.1;
  std::optional<double> lr_basis;
  int trace_every = 100;
};

void run_fit(const Common& c, const FitArgs& a) {
  const fs::path dir = a.scene;
  SceneManifest m = load_manifest(dir);
  const fs::path part_path = dir / require_file(m, "partition", "lift");
  const PointCloud part = load_cloud(part_path);
  const auto& cluster_of = label_column(part, "cluster", part_path);
  int clusters = 0;
  for (int l : cluster_of) clusters = std::max(clusters, l + 1);
  std::vector<std::vector<int>> members(clusters);
  for (int i = 0; i < int(cluster_of.size()); ++i) {
    if (cluster_of[i] >= 0) members[cluster_of[i]].push_back(i);
  }

  std::vector<ParamPoint> params(part.points.size());
  for (std::size_t i = 0; i < params.size(); ++i) params[i] = FreeParam{part.points[i]};
  std::vector<PlaneBasis> bases;
  std::vector<PlaneRecord> records;
  RansacParams rp;
  rp.inlier_dist = 3.0 * c.delta;
  for (int k = 0; k < clusters; ++k) {
    if (members[k].size() < 3) continue;
    Points3 pts;
    for (int i : members[k]) pts.push_back(part.points[i]);
    const RansacResult rr = ransac_plane(pts, rp, derive_seed(c.seed, std::uint64_t(2 * k)));
    Points3 inl;
    for (int j : rr.inliers) inl.push_back(pts[j]);
    const PlaneEq plane = fit_plane(inl);
    const PlaneBasis basis = select_basis(project_to_plane(inl, plane), derive_seed(c.seed, std::uint64_t(2 * k + 1)));
    const int index = int(bases.size());
    for (int j : rr.inliers) {
      const int i = members[k][j];
      params[i] = PlanarParam{index, to_barycentric(part.points[i], basis)};
    }
    bases.push_back(basis);
    records.push_back({k, basis.plane(), basis, members[k].size(), rr.inliers.size()});
  }

  // rates are given at unit scale: divide by the squared basis size and, for
  // the basis points (whose gradient sums over members), by the cluster size
  double scale = 0.0;
  std::size_t largest = 1;
  for (std::size_t k = 0; k < bases.size(); ++k) {
    scale = std::max(scale, bases[k].max_side());
    largest = std::max(largest, records[k].inliers);
  }
  const double norm = scale > 0.0 ? 1.0 / (scale * scale) : 1.0;
  FitParams fp;
  fp.iterations = a.iterations;
  fp.lr_point = a.lr_point * norm;
  fp.lr_basis = (a.lr_basis ? *a.lr_basis : 0.1 * a.lr_point) * norm / double(largest);
  // points whose residual stays below the resolution are never reverted
  fp.min_gradient = 2.0 * c.delta;
  const FitResult res = fit_planar_scene(params, bases, part.points, fp, c.seed);

  std::ostringstream trace;
  trace << "iteration loss planar reverted\n";
  for (const FitTraceRow& r : res.trace) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%d %.9g %d %d\n", r.iteration, r.loss, r.planar, r.reverted);
    trace << buf;
    if (a.trace_every > 0 && (r.iteration % a.trace_every == 0 || &r == &res.trace.back())) std::fputs(buf, stdout);
  }
  write_text(dir / "fit_trace.txt", trace.str());

  for (std::size_t k = 0; k < records.size(); ++k) {
    records[k].basis = res.bases[k];
    records[k].plane = res.bases[k].plane();
  }
  write_planes(dir / "planes.json", records);
  PointCloud fitted;
  std::vector<int> label(res.points.size(), -1);
  for (std::size_t i = 0; i < res.points.size(); ++i) {
    fitted.points.push_back(reconstruct(res.points[i], res.bases));
    if (const auto* p = std::get_if<PlanarParam>(&res.points[i])) label[i] = records[p->plane_id].id;
  }
  fitted.labels["cluster"] = label;
  save_cloud(fitted, dir / "fit_points.ply");
  m.files["planes"] = "planes.json";
  m.files["fit_points"] = "fit_points.ply";
  m.files["fit_trace"] = "fit_trace.txt";
  m.delta = c.delta;
  m.seeds["fit"] = c.seed;
  save_manifest(dir, m);
  std::printf("planes %zu reverted %zu\n", records.size(), res.reverted.size());
}

// --- refine ----------------------------------------------------------------

struct RefineArgs {
  std::string scene;
  std::string input = "dense_mesh";
  std::string output = "refined_mesh";
  double radius = 0.15;
};

void run_refine(const Common& c, const RefineArgs& a) {
  const fs::path dir = a.scene;
  SceneManifest m = load_manifest(dir);
  TriMesh mesh = load_mesh(dir / require_file(m, a.input, "synth"));
  mesh.plane_id.clear();
  const auto records = read_planes(dir / require_file(m, "planes", "fit"));
  const std::string sparse_key = m.files.count("fit_points") ? "fit_points" : "partition";
  const fs::path sparse_path = dir / require_file(m, sparse_key, "lift");
  const PointCloud sparse = load_cloud(sparse_path);
  const auto& cluster_of = label_column(sparse, "cluster", sparse_path);

  std::map<int, int> index_of;
  std::vector<PlaneEq> planes;
  for (const PlaneRecord& r : records) {
    index_of[r.id] = int(planes.size());
    planes.push_back(r.plane);
  }
  std::vector<int> sparse_labels(cluster_of.size(), -1);
  for (std::size_t i = 0; i < cluster_of.size(); ++i) {
    const auto it = index_of.find(cluster_of[i]);
    if (it != index_of.end()) sparse_labels[i] = it->second;
  }
  const auto dense_labels = propagate_labels(mesh.vertices, sparse.points, sparse_labels, planes, a.radius, 3.0 * c.delta);
  const auto sets = plane_point_sets(mesh.vertices, dense_labels, int(planes.size()));
  auto clusters = assign_vertices(mesh, sets, c.delta);
  std::vector<PlaneRegion> regions;
  std::size_t planar_before = 0;
  for (std::size_t k = 0; k < records.size(); ++k) {
    clusters[k].plane_id = records[k].id;
    planar_before += clusters[k].vertices.size();
    regions.push_back({clusters[k], records[k].basis});
  }
  RefineParams rp;
  rp.delta = c.delta;
  rp.grid_spacing = c.grid_spacing;
  std::vector<RegionReport> reports;
  const TriMesh refined = refine_mesh(mesh, regions, rp, &reports);
  const std::string name = a.output + ".ply";
  save_mesh(refined, dir / name);
  m.files[a.output] = name;
  m.delta = c.delta;
  m.grid_spacing = c.grid_spacing;
  m.seeds["refine"] = c.seed;
  save_manifest(dir, m);
  for (const RegionReport& r : reports) {
    std::printf("plane %d %s removed %zu rim %zu grid %zu faces %zu spacing %.4f\n", r.plane_id,
                r.skipped ? "skipped" : "refined", r.removed_faces, r.boundary_vertices, r.grid_vertices, r.new_faces,
                r.grid_spacing);
  }
  const std::size_t planar_after = planar_vertex_count(refined);
  std::printf("planar vertices %zu -> %zu (%.2f%% reduction)\n", planar_before, planar_after,
              planar_before ? 100.0 * (1.0 - double(planar_after) / double(planar_before)) : 0.0);
}

// --- spc -------------------------------------------------------------------

struct SpcArgs {
  std::string mesh;
  std::vector<int> plane_ids;
  std::string extent = "outer";
  bool detach = false;
  std::string out_dir = ".";
};

void run_spc(const Common& c, const SpcArgs& a) {
  TriMesh mesh = load_mesh(a.mesh);
  if (!mesh.has_labels()) throw Error(ErrorCode::Schema, a.mesh + " has no plane_id vertex labels");
  const SupportExtent extent = a.extent == "mer" ? SupportExtent::Mer : SupportExtent::OuterLoop;
  RefineParams rp;
  rp.delta = c.delta;
  rp.grid_spacing = c.grid_spacing;
  std::map<int, PlaneEq> planes;
  for (int id : a.plane_ids) {
    PlaneVertexCluster cluster;
    cluster.plane_id = id;
    Points3 pts;
    for (int v = 0; v < int(mesh.vertices.size()); ++v) {
      if (mesh.plane_id[v] == id) {
        cluster.vertices.push_back(v);
        pts.push_back(mesh.vertices[v]);
      }
    }
    if (pts.size() < 3) throw Error(ErrorCode::InvalidArgument, "plane " + std::to_string(id) + " has fewer than 3 vertices");
    const PlaneEq plane = fit_plane(pts);
    const PlaneBasis basis = select_basis_max_area(project_to_plane(pts, plane));
    RegionReport rep;
    mesh = correct_supportive_plane(mesh, cluster, basis, rp, extent, &rep);
    planes[id] = basis.plane();
    std::printf("plane %d rim %zu grid %zu faces %zu\n", id, rep.boundary_vertices, rep.grid_vertices, rep.new_faces);
  }
  const fs::path out = a.out_dir;
  fs::create_directories(out);
  if (!a.detach) {
    save_mesh(mesh, out / "scene.ply");
    return;
  }
  const DetachResult det = detach_object(mesh, a.plane_ids);
  save_mesh(det.scene, out / "scene.ply");
  for (std::size_t k = 0; k < det.objects.size(); ++k) {
    TriMesh obj = det.objects[k];
    std::set<int> touched;
    for (int v = 0; v < int(obj.vertices.size()); ++v) {
      if (planes.count(obj.label(v))) touched.insert(obj.label(v));
    }
    SealReport total;
    for (int id : touched) {
      SealReport sr;
      obj = seal_contact(obj, planes.at(id), c.delta, &sr);
      total.loops_sealed += sr.loops_sealed;
      total.cap_faces += sr.cap_faces;
    }
    save_mesh(obj, out / ("object_" + std::to_string(k) + ".ply"));
    std::printf("object %zu vertices %zu faces %zu sealed %zu\n", k, obj.vertices.size(), obj.faces.size(),
                total.loops_sealed);
  }
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string scene;
  std::string pred;
  std::string gt;
  std::string gt_labels;
  std::string pred_key = "refined_mesh";
  double tau = kDefaultTau;
  int k = 20;
  std::size_t samples = 200000;
  std::size_t plane_samples = 10000;
  std::string csv;
};

void run_eval(const Common& c, const EvalArgs& a) {
  fs::path pred_path = a.pred, gt_path = a.gt;
  std::optional<SceneManifest> m;
  if (!a.scene.empty()) {
    m = load_manifest(a.scene);
    if (pred_path.empty()) pred_path = fs::path(a.scene) / require_file(*m, a.pred_key, "refine");
    if (gt_path.empty()) gt_path = fs::path(a.scene) / require_file(*m, "gt_mesh", "synth");
  }
  if (pred_path.empty() || gt_path.empty()) throw Error(ErrorCode::InvalidArgument, "need --pred and --gt (or --scene)");
  const TriMesh pred = load_mesh(pred_path);
  TriMesh gt = load_mesh(gt_path);
  if (!a.gt_labels.empty()) {
    const PointCloud lab = load_cloud(a.gt_labels);
    const auto& col = label_column(lab, "plane_id", a.gt_labels);
    if (col.size() != gt.vertices.size()) throw Error(ErrorCode::DimensionMismatch, "label count differs from GT vertex count");
    gt.plane_id = col;
  }
  const auto ps = sample_mesh(pred, a.samples, derive_seed(c.seed, 1));
  const auto gs = sample_mesh(gt, a.samples, derive_seed(c.seed, 2));
  const SceneMetrics sm = scene_metrics(ps.points, gs.points, a.tau);
  PlanarMetrics pm;
  if (gt.has_labels()) {
    PlanarEvalParams pp;
    pp.k = a.k;
    pp.samples_per_plane = a.plane_samples;
    pp.pred_samples = a.samples;
    pp.delta = c.delta;
    pp.seed = derive_seed(c.seed, 3);
    pm = planar_metrics(pred, gt, pp);
  } else {
    warn("GT mesh has no plane labels; planar metrics skipped");
    pm.fidelity = pm.completion = pm.chamfer = std::nan("");
  }
  std::printf("%-14s %12s\n", "metric", "value");
  const std::pair<const char*, double> rows[] = {{"acc", sm.acc},
                                                 {"comp", sm.comp},
                                                 {"prec", sm.prec},
                                                 {"recall", sm.recall},
                                                 {"fscore", sm.fscore},
                                                 {"fidelity_cm", pm.fidelity},
                                                 {"completion_cm", pm.completion},
                                                 {"chamfer_cm", pm.chamfer}};
  for (const auto& [name, v] : rows) std::printf("%-14s %12.6f\n", name, v);
  std::printf("%-14s %12zu\n", "planes", pm.planes.size());
  if (!a.csv.empty()) {
    fs::path csv = a.csv;
    if (m && csv.is_relative() && csv.parent_path().empty()) csv = fs::path(a.scene) / csv;
    write_text(csv, metrics_csv_header() + "\n" + metrics_csv_row(sm, pm) + "\n");
  }
}

// --- info ------------------------------------------------------------------

void describe_mesh(const std::string& name, const TriMesh& mesh) {
  int comps = 0;
  if (!mesh.vertices.empty()) connected_components(mesh, &comps);
  std::set<int> labels(mesh.plane_id.begin(), mesh.plane_id.end());
  labels.erase(kNoPlane);
  std::printf("%s: vertices %zu faces %zu components %d open_edges %zu planes %zu\n", name.c_str(),
              mesh.vertices.size(), mesh.faces.size(), comps, open_edges(mesh.faces).size(), labels.size());
}

void run_info(const std::string& scene, const std::string& mesh) {
  if (!mesh.empty()) describe_mesh(mesh, load_mesh(mesh));
  if (scene.empty()) return;
  const SceneBundle b = load_scene(scene);
  const SceneManifest& m = b.manifest;
  std::printf("alpha %g sigma %d delta %g grid_spacing %s\n", m.alpha, m.sigma, m.delta,
              m.grid_spacing ? fmt("%g", *m.grid_spacing).c_str() : "default");
  for (const auto& [stage, seed] : m.seeds) std::printf("seed %s %llu\n", stage.c_str(), (unsigned long long)seed);
  std::size_t detected = 0;
  for (const ViewData& v : b.views) detected += v.planes.has_value();
  std::printf("views %zu (plane masks %zu)\n", b.views.size(), detected);
  if (b.cloud) std::printf("cloud: points %zu\n", b.cloud->points.size());
  if (b.partition) {
    std::set<int> ids(b.partition->labels.at("cluster").begin(), b.partition->labels.at("cluster").end());
    ids.erase(kUnclustered);
    std::printf("partition: clusters %zu\n", ids.size());
  }
  if (b.planes) std::printf("planes: %zu\n", b.planes->size());
  for (const auto& [name, mesh_data] : b.meshes) describe_mesh(name, mesh_data);
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planekit: planar scene reconstruction toolkit"};
  app.require_subcommand(1);
  Common c;

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "generate a synthetic scene directory");
  synth->add_option("--out", sa.out, "output directory")->required();
  synth->add_option("--views", sa.views, "camera count")->capture_default_str();
  synth->add_option("--res", sa.res, "image size WxH")->capture_default_str();
  synth->add_flag("--table", sa.table, "add a table");
  synth->add_option("--objects", sa.objects, "boxes on the table (implies --table)")->capture_default_str();
  synth->add_option("--cloud-points", sa.cloud_points, "surface samples")->capture_default_str();
  synth->add_option("--dense-edge", sa.dense_edge, "dense mesh edge length")->capture_default_str();
  synth->add_option("--dense-noise", sa.dense_noise, "dense mesh normal noise sigma")->capture_default_str();
  synth->add_option("--kappa", sa.kappa, "normal noise concentration (0 = off)")->capture_default_str();
  synth->add_option("--erosion", sa.erosion, "mask erosion in pixels")->capture_default_str();
  add_common(synth, c);

  std::string scene_dir;
  auto* detect = app.add_subcommand("detect", "per-view plane detection");
  detect->add_option("--scene", scene_dir, "scene directory")->required();
  add_common(detect, c);

  LiftArgs la;
  auto* lift = app.add_subcommand("lift", "co-planarity graph and clustering");
  lift->add_option("--scene", la.scene, "scene directory")->required();
  lift->add_option("--max-instance-points", la.max_instance_points)->capture_default_str();
  lift->add_option("--min-cluster-size", la.min_cluster_size)->capture_default_str();
  lift->add_option("--resolution", la.resolution, "Leiden resolution")->capture_default_str();
  add_common(lift, c);

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "plane fitting and planar optimization");
  fit->add_option("--scene", fa.scene, "scene directory")->required();
  fit->add_option("--iterations", fa.iterations)->capture_default_str();
  fit->add_option("--lr", fa.lr_point, "point learning rate at unit scale")->capture_default_str();
  fit->add_option("--lr-basis", fa.lr_basis, "basis learning rate (default lr/10)");
  fit->add_option("--trace-every", fa.trace_every, "print every n-th trace row (0 = none)")->capture_default_str();
  add_common(fit, c);

  RefineArgs ra;
  auto* refine = app.add_subcommand("refine", "plane-guided mesh refinement");
  refine->add_option("--scene", ra.scene, "scene directory")->required();
  refine->add_option("--input", ra.input, "manifest key of the input mesh")->capture_default_str();
  refine->add_option("--output", ra.output, "manifest key of the output mesh")->capture_default_str();
  refine->add_option("--radius", ra.radius, "label propagation radius")->capture_default_str();
  add_common(refine, c);

  SpcArgs pa;
  auto* spc = app.add_subcommand("spc", "supportive plane correction");
  spc->add_option("--mesh", pa.mesh, "labelled input mesh")->required();
  spc->add_option("--plane-ids", pa.plane_ids, "supportive plane ids")->required()->delimiter(',');
  spc->add_option("--extent", pa.extent, "outer | mer")->check(CLI::IsMember({"outer", "mer"}))->capture_default_str();
  spc->add_flag("--detach", pa.detach, "split and seal resting objects");
  spc->add_option("--out-dir", pa.out_dir, "output directory")->capture_default_str();
  add_common(spc, c);

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "reconstruction metrics");
  eval->add_option("--scene", ea.scene, "scene directory (pred/gt from the manifest)");
  eval->add_option("--pred", ea.pred, "predicted mesh");
  eval->add_option("--gt", ea.gt, "ground-truth mesh");
  eval->add_option("--gt-labels", ea.gt_labels, "PLY with a plane_id per GT vertex");
  eval->add_option("--pred-key", ea.pred_key, "manifest key of the prediction")->capture_default_str();
  eval->add_option("--tau", ea.tau, "distance threshold (m)")->capture_default_str();
  eval->add_option("--k", ea.k, "largest GT planes evaluated (0 = all)")->capture_default_str();
  eval->add_option("--samples", ea.samples, "surface samples per mesh")->capture_default_str();
  eval->add_option("--plane-samples", ea.plane_samples, "samples per GT plane")->capture_default_str();
  eval->add_option("--csv", ea.csv, "write a one-row metrics CSV");
  add_common(eval, c);

  std::string info_mesh;
  auto* info = app.add_subcommand("info", "summarize a scene directory or mesh");
  info->add_option("--scene", scene_dir, "scene directory");
  info->add_option("--mesh", info_mesh, "mesh file");
  add_common(info, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: usage: %s\n", one_line(e.what()).c_str());
    return 2;
  }

  try {
    if (c.threads < 0) throw Error(ErrorCode::InvalidArgument, "--threads must be >= 0");
    if (c.threads > 0) set_num_threads(c.threads);
    set_warnings_enabled(!c.quiet);
    if (!(c.delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "--delta must be positive");
    if (*synth) run_synth(c, sa);
    if (*detect) run_detect(c, scene_dir);
    if (*lift) run_lift(c, la);
    if (*fit) run_fit(c, fa);
    if (*refine) run_refine(c, ra);
    if (*spc) run_spc(c, pa);
    if (*eval) run_eval(c, ea);
    if (*info) {
      if (scene_dir.empty() && info_mesh.empty()) throw Error(ErrorCode::InvalidArgument, "need --scene or --mesh");
      run_info(scene_dir, info_mesh);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", std::string(to_string(e.code())).c_str(), one_line(e.what()).c_str());
    return 3 + int(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", one_line(e.what()).c_str());
    return 1;
  }
  return 0;
}
