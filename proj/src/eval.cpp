#include "planekit/eval.hpp"

#include "planekit/plane_param.hpp"
#include "planekit/random.hpp"
#include "planekit/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>

namespace planekit {

SampledCloud sample_mesh(const TriMesh& mesh, std::size_t n, std::uint64_t seed) {
  SampledCloud out;
  if (n == 0) return out;
  std::vector<double> areas(mesh.faces.size());
  double total = 0.0;
  for (std::size_t f = 0; f < areas.size(); ++f) {
    areas[f] = face_area(mesh, int(f));
    total += areas[f];
  }
  if (!(total > 0.0)) throw Error(ErrorCode::Degenerate, "mesh has no area to sample");
  Rng rng(seed);
  std::discrete_distribution<std::size_t> pick(areas.begin(), areas.end());
  out.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Face& f = mesh.faces[pick(rng)];
    const double r1 = std::sqrt(uniform01(rng)), r2 = uniform01(rng);
    out.points.push_back((1.0 - r1) * mesh.vertices[f[0]] + r1 * (1.0 - r2) * mesh.vertices[f[1]] +
                         r1 * r2 * mesh.vertices[f[2]]);
  }
  return out;
}

SampledCloud vertex_cloud(const TriMesh& mesh) {
  SampledCloud out;
  out.points = mesh.vertices;
  out.source = SampledCloud::Source::Vertices;
  return out;
}

SceneMetrics scene_metrics(std::span<const Vec3> pred, std::span<const Vec3> gt, double tau, Exec exec) {
  if (pred.empty() || gt.empty()) throw Error(ErrorCode::InvalidArgument, "scene metrics need non-empty clouds");
  if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be positive");
  const PointGrid gt_grid(gt, tau), pred_grid(pred, tau);
  const auto d_pred = nearest_distances(gt_grid, pred, exec);
  const auto d_gt = nearest_distances(pred_grid, gt, exec);
  SceneMetrics m;
  std::size_t close_pred = 0, close_gt = 0;
  for (double d : d_pred) {
    m.acc += d;
    if (d < tau) ++close_pred;
  }
  for (double d : d_gt) {
    m.comp += d;
    if (d < tau) ++close_gt;
  }
  m.acc /= double(pred.size());
  m.comp /= double(gt.size());
  m.prec = double(close_pred) / double(pred.size());
  m.recall = double(close_gt) / double(gt.size());
  m.fscore = (m.prec + m.recall) > 0.0 ? 2.0 * m.prec * m.recall / (m.prec + m.recall) : 0.0;
  return m;
}

PlanarMetrics planar_metrics(const TriMesh& pred, const TriMesh& gt, const PlanarEvalParams& params, Exec exec) {
  if (!gt.has_labels()) throw Error(ErrorCode::InvalidArgument, "planar metrics need GT plane labels");
  if (!(params.delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  // GT regions
  std::map<int, std::vector<int>> region_faces;
  std::map<int, double> region_area;
  for (int f = 0; f < int(gt.faces.size()); ++f) {
    const Face& t = gt.faces[f];
    const int l = gt.plane_id[t[0]];
    if (l == kNoPlane || gt.plane_id[t[1]] != l || gt.plane_id[t[2]] != l) continue;
    region_faces[l].push_back(f);
    region_area[l] += face_area(gt, f);
  }
  std::vector<std::pair<int, double>> order(region_area.begin(), region_area.end());
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::size_t k = order.size();
  if (params.k > 0) {
    if (std::size_t(params.k) > order.size()) {
      warn("only " + std::to_string(order.size()) + " GT planes available for k = " + std::to_string(params.k));
    } else {
      k = std::size_t(params.k);
    }
  }
  order.resize(k);

  PlanarMetrics out;
  if (order.empty()) return out;
  const SampledCloud pred_samples = sample_mesh(pred, params.pred_samples, params.seed);
  const TriangleGrid pred_grid(pred);
  double fid_sum = 0.0, comp_sum = 0.0, cham_sum = 0.0;
  std::size_t fid_count = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const int label = order[i].first;
    const TriMesh region = extract_faces(gt, region_faces[label]);
    const PlaneEq plane = fit_plane(region.vertices);
    Points3 near;
    for (const Vec3& p : pred_samples.points) {
      if (std::abs(plane.signed_distance(p)) <= 3.0 * params.delta) near.push_back(p);
    }
    const TriangleGrid region_grid(region);
    const auto fid_d = surface_distances(region_grid, near, exec);
    const SampledCloud gt_samples = sample_mesh(region, params.samples_per_plane, derive_seed(params.seed, label + 1));
    const auto comp_d = surface_distances(pred_grid, gt_samples.points, exec);

    PlaneScore s;
    s.plane_id = label;
    s.area = order[i].second;
    double acc = 0.0;
    for (double d : comp_d) acc += d;
    s.completion = comp_d.empty() ? 0.0 : 100.0 * acc / double(comp_d.size());
    if (fid_d.empty()) {
      s.fidelity = std::nan("");
      s.chamfer = s.completion;
      warn("no predicted surface near GT plane " + std::to_string(label));
    } else {
      acc = 0.0;
      for (double d : fid_d) acc += d;
      s.fidelity = 100.0 * acc / double(fid_d.size());
      s.chamfer = 0.5 * (s.fidelity + s.completion);
      fid_sum += s.fidelity;
      ++fid_count;
    }
    comp_sum += s.completion;
    cham_sum += s.chamfer;
    out.planes.push_back(s);
  }
  out.fidelity = fid_count ? fid_sum / double(fid_count) : std::nan("");
  out.completion = comp_sum / double(out.planes.size());
  out.chamfer = cham_sum / double(out.planes.size());
  return out;
}

std::string metrics_csv_header() { return "acc,comp,prec,recall,fscore,fidelity_cm,completion_cm,chamfer_cm,planes"; }

std::string metrics_csv_row(const SceneMetrics& s, const PlanarMetrics& p) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%zu", s.acc, s.comp, s.prec, s.recall,
                s.fscore, p.fidelity, p.completion, p.chamfer, p.planes.size());
  return buf;
}

}  // namespace planekit
