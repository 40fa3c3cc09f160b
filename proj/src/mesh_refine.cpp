#include "planekit/mesh_refine.hpp"

#include "planekit/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace planekit {

std::vector<PlaneVertexCluster> assign_vertices(const TriMesh& mesh, const std::vector<Points3>& plane_points,
                                                double delta, Exec exec) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  const int planes = int(plane_points.size());
  std::vector<PlaneVertexCluster> clusters(planes);
  for (int p = 0; p < planes; ++p) clusters[p].plane_id = p;

  Points3 all;
  std::vector<int> owner;
  for (int p = 0; p < planes; ++p) {
    all.insert(all.end(), plane_points[p].begin(), plane_points[p].end());
    owner.insert(owner.end(), plane_points[p].size(), p);
  }
  if (all.empty()) return clusters;
  const double near = 1.5 * delta, exclude = 0.5 * delta;
  const PointGrid grid(all, near);

  const std::int64_t nv = std::int64_t(mesh.vertices.size());
  std::vector<int> label(nv, -1);
  auto assign = [&](std::int64_t v) {
    // nearest distance per plane among points closer than 1.5 delta
    std::vector<std::pair<int, double>> best;
    grid.for_each_within(mesh.vertices[v], near, [&](int i, double d2) {
      const double d = std::sqrt(d2);
      if (!(d < near)) return;
      const int p = owner[i];
      auto it = std::find_if(best.begin(), best.end(), [&](const auto& b) { return b.first == p; });
      if (it == best.end()) {
        best.emplace_back(p, d);
      } else {
        it->second = std::min(it->second, d);
      }
    });
    int chosen = -1;
    double chosen_d = std::numeric_limits<double>::infinity();
    for (const auto& [p, d] : best) {
      bool excluded = false;
      for (const auto& [q, dq] : best) {
        if (q != p && !(dq > exclude)) excluded = true;
      }
      if (excluded) continue;
      if (d < chosen_d || (d == chosen_d && p < chosen)) {
        chosen = p;
        chosen_d = d;
      }
    }
    label[v] = chosen;
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 512)
    for (std::int64_t v = 0; v < nv; ++v) assign(v);
  } else {
    for (std::int64_t v = 0; v < nv; ++v) assign(v);
  }
  for (std::int64_t v = 0; v < nv; ++v) {
    if (label[v] >= 0) clusters[label[v]].vertices.push_back(int(v));
  }
  return clusters;
}

PlaneVertexCluster classify_boundary_interior(const TriMesh& mesh, PlaneVertexCluster cluster) {
  std::vector<char> member(mesh.vertices.size(), 0), border(mesh.vertices.size(), 0);
  std::sort(cluster.vertices.begin(), cluster.vertices.end());
  cluster.vertices.erase(std::unique(cluster.vertices.begin(), cluster.vertices.end()), cluster.vertices.end());
  for (int v : cluster.vertices) member[v] = 1;
  for (const Face& f : mesh.faces) {
    for (int i = 0; i < 3; ++i) {
      const int a = f[i], b = f[(i + 1) % 3];
      if (member[a] && !member[b]) border[a] = 1;
      if (member[b] && !member[a]) border[b] = 1;
    }
  }
  cluster.boundary.clear();
  cluster.interior.clear();
  for (int v : cluster.vertices) (border[v] ? cluster.boundary : cluster.interior).push_back(v);
  return cluster;
}

TriMesh remove_planar_faces(const TriMesh& mesh, const PlaneVertexCluster& cluster) {
  std::vector<char> member(mesh.vertices.size(), 0);
  for (int v : cluster.vertices) member[v] = 1;
  TriMesh out;
  out.vertices = mesh.vertices;
  out.plane_id = mesh.plane_id;
  for (const Face& f : mesh.faces) {
    if (!(member[f[0]] && member[f[1]] && member[f[2]])) out.faces.push_back(f);
  }
  return out;
}

void RefineParams::validate() const {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  if (grid_spacing && !(*grid_spacing > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid spacing must be positive");
  if (stamp_radius && !(*stamp_radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "stamp radius must be positive");
}

double default_grid_spacing(double delta, double mer_long_side) { return std::max(4.0 * delta, mer_long_side / 64.0); }

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + std::ptrdiff_t(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

// Lattice coordinates along one MER axis, centred so both ends are equally
// inset: -half + r + i * spacing.
std::vector<double> grid_axis(double half, double spacing) {
  const int n = int(std::floor(2.0 * half / spacing + 1e-9));
  const double r = 0.5 * (2.0 * half - n * spacing);
  std::vector<double> out;
  for (int i = 0; i <= n; ++i) out.push_back(-half + r + i * spacing);
  return out;
}

Points2 loop_polygon(const std::vector<int>& loop, const std::vector<int>& slot, const Points2& local) {
  Points2 poly;
  for (int v : loop) {
    if (slot[v] >= 0) poly.push_back(local[slot[v]]);
  }
  return poly;
}

}  // namespace

bool remesh_region(TriMesh& work, const PlaneVertexCluster& cluster, const PlaneEq& plane, const RefineParams& params,
                   const PatchPolicy& policy, RegionReport* report) {
  params.validate();
  if (report) {
    *report = RegionReport{};
    report->plane_id = cluster.plane_id;
    report->skipped = true;
  }
  const std::size_t nv = work.vertices.size();
  if (work.plane_id.size() != nv) throw Error(ErrorCode::InvalidArgument, "workspace mesh needs labels");
  auto skip = [&](const std::string& why) {
    warn("plane " + std::to_string(cluster.plane_id) + ": " + why + "; region skipped");
    return false;
  };
  if (cluster.vertices.size() < 3) return skip("fewer than three vertices");

  // cluster slots and replaced faces
  std::vector<int> slot(nv, -1);
  for (int i = 0; i < int(cluster.vertices.size()); ++i) slot[cluster.vertices[i]] = i;
  std::vector<char> removed(work.faces.size(), 0);
  Vec3 nsum = Vec3::Zero();
  std::vector<double> edges;
  for (std::size_t f = 0; f < work.faces.size(); ++f) {
    const Face& t = work.faces[f];
    if (slot[t[0]] < 0 || slot[t[1]] < 0 || slot[t[2]] < 0) continue;
    removed[f] = 1;
    nsum += face_normal(work, int(f));
    for (int i = 0; i < 3; ++i) edges.push_back((work.vertices[t[i]] - work.vertices[t[(i + 1) % 3]]).norm());
  }

  // projection and the MER-aligned frame; the normal follows the old faces
  Vec3 n = plane.normal;
  if (nsum.dot(n) < 0.0) n = -n;
  Points3 projected;
  Vec3 centroid = Vec3::Zero();
  for (int v : cluster.vertices) {
    projected.push_back(plane.project(work.vertices[v]));
    centroid += projected.back();
  }
  centroid /= double(projected.size());
  const PlaneFrame frame0 = PlaneFrame::from_normal(plane.project(centroid), n);
  Points2 local0;
  for (const Vec3& p : projected) local0.push_back(frame0.to_local(p));
  Rect2 mer;
  try {
    mer = min_enclosing_rect(local0);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Degenerate) throw;
    return skip("degenerate enclosing rectangle");
  }
  if (!(mer.area() > 0.0)) return skip("degenerate enclosing rectangle");
  PlaneFrame frame;
  frame.origin = frame0.to_world(mer.center);
  frame.u = (mer.u.x() * frame0.u + mer.u.y() * frame0.v).normalized();
  frame.v = n.cross(frame.u);
  Points2 local;
  for (const Vec3& p : projected) local.push_back(frame.to_local(p));
  const Rect2 region{Vec2::Zero(), Vec2::UnitX(), mer.half};

  const double spacing =
      params.grid_spacing ? *params.grid_spacing : default_grid_spacing(params.delta, 2.0 * mer.half.maxCoeff());
  const double stamp = params.stamp_radius ? *params.stamp_radius : std::max(1.5 * params.delta, median(edges));
  const Occupancy occ = build_occupancy(local, 0.5 * std::min(stamp, spacing), stamp, region);

  // triangulation boundary: boundary vertices that are not on a fill loop
  std::vector<char> excluded(nv, 0);
  std::vector<Points2> fill_polys;
  for (const auto& loop : policy.fill_loops) {
    for (int v : loop) excluded[v] = 1;
    fill_polys.push_back(loop_polygon(loop, slot, local));
  }
  Points2 clip;
  if (policy.extent == PatchExtent::Polygon) {
    clip = loop_polygon(policy.clip_loop, slot, local);
    if (clip.size() < 3) return skip("clip polygon has fewer than three vertices");
  }
  std::vector<int> rim;
  Points2 pts;
  std::vector<char> in_rim(nv, 0);
  auto add_rim = [&](int v) {
    if (slot[v] < 0 || excluded[v] || in_rim[v]) return;
    in_rim[v] = 1;
    rim.push_back(v);
    pts.push_back(local[slot[v]]);
  };
  for (int v : cluster.boundary) add_rim(v);
  // the clip loop may run along the mesh border, where no edge leaves the cluster
  if (policy.extent == PatchExtent::Polygon) {
    for (int v : policy.clip_loop) add_rim(v);
  }

  Points3 rim3;
  for (const Vec2& p : pts) rim3.emplace_back(p.x(), p.y(), 0.0);
  const PointGrid rim_grid(rim3, std::max(spacing, 1e-9));
  std::size_t grid_count = 0;
  for (double y : grid_axis(mer.half.y(), spacing)) {
    for (double x : grid_axis(mer.half.x(), spacing)) {
      const Vec2 g(x, y);
      bool keep = false;
      switch (policy.extent) {
        case PatchExtent::Occupancy: keep = occ.occupied_at(g); break;
        case PatchExtent::Rect: keep = true; break;
        case PatchExtent::Polygon: keep = point_in_polygon(g, clip); break;
      }
      if (!keep) continue;
      if (!rim3.empty() && rim_grid.nearest(Vec3(x, y, 0.0)).distance < 0.5 * spacing) continue;
      pts.push_back(g);
      ++grid_count;
    }
  }
  if (pts.size() < 3) return skip("fewer than three patch vertices");
  Tri2Mesh tri;
  try {
    tri = delaunay(pts);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Degenerate) throw;
    return skip(std::string("triangulation failed (") + e.what() + ")");
  }

  std::vector<std::array<int, 3>> kept;
  for (const auto& t : tri.triangles) {
    const Vec2 c = (pts[t[0]] + pts[t[1]] + pts[t[2]]) / 3.0;
    bool keep = false;
    for (const Points2& hole : fill_polys) {
      if (hole.size() >= 3 && point_in_polygon(c, hole)) keep = true;
    }
    if (!keep) {
      switch (policy.extent) {
        case PatchExtent::Occupancy: keep = occ.occupied_at(c); break;
        case PatchExtent::Rect: keep = true; break;
        case PatchExtent::Polygon: keep = point_in_polygon(c, clip) && occ.occupied_at(c); break;
      }
    }
    if (keep) kept.push_back(t);
  }
  if (kept.empty()) return skip("no triangles survived the occupancy filter");

  // commit: drop replaced faces, move cluster vertices, append grid vertices
  std::size_t removed_count = 0;
  std::vector<Face> faces;
  faces.reserve(work.faces.size());
  for (std::size_t f = 0; f < work.faces.size(); ++f) {
    if (removed[f]) {
      ++removed_count;
    } else {
      faces.push_back(work.faces[f]);
    }
  }
  work.faces = std::move(faces);
  for (int i = 0; i < int(cluster.vertices.size()); ++i) {
    const int v = cluster.vertices[i];
    work.vertices[v] = projected[i];
    work.plane_id[v] = cluster.plane_id;
  }
  std::vector<int> id(pts.size(), -1);
  for (std::size_t i = 0; i < rim.size(); ++i) id[i] = rim[i];
  for (std::size_t i = rim.size(); i < pts.size(); ++i) {
    if (tri.representative[i] != int(i)) continue;
    id[i] = int(work.vertices.size());
    work.vertices.push_back(frame.to_world(pts[i]));
    work.plane_id.push_back(cluster.plane_id);
  }
  for (const auto& t : kept) {
    work.faces.push_back({id[tri.representative[t[0]]], id[tri.representative[t[1]]], id[tri.representative[t[2]]]});
  }
  if (report) {
    report->skipped = false;
    report->removed_faces = removed_count;
    report->deleted_vertices = cluster.interior.size();
    report->boundary_vertices = rim.size();
    report->grid_vertices = grid_count;
    report->new_faces = kept.size();
    report->grid_spacing = spacing;
  }
  return true;
}

namespace {

TriMesh workspace(const TriMesh& mesh) {
  mesh.validate();
  TriMesh work = mesh;
  work.plane_id.assign(mesh.vertices.size(), kNoPlane);
  return work;
}

}  // namespace

TriMesh refine_plane_region(const TriMesh& mesh, const PlaneVertexCluster& cluster, const PlaneBasis& basis,
                            const RefineParams& params, RegionReport* report) {
  TriMesh work = workspace(mesh);
  remesh_region(work, classify_boundary_interior(mesh, cluster), basis.plane(), params, PatchPolicy{}, report);
  return compact(work);
}

TriMesh refine_mesh(const TriMesh& mesh, std::vector<PlaneRegion> regions, const RefineParams& params,
                    std::vector<RegionReport>* reports) {
  params.validate();
  TriMesh work = workspace(mesh);
  std::vector<char> claimed(mesh.vertices.size(), 0);
  for (const PlaneRegion& r : regions) {
    for (int v : r.cluster.vertices) {
      if (v < 0 || v >= int(mesh.vertices.size())) throw Error(ErrorCode::InvalidArgument, "cluster vertex out of range");
      if (claimed[v]) throw Error(ErrorCode::InvalidArgument, "plane clusters overlap");
      claimed[v] = 1;
    }
  }
  std::stable_sort(regions.begin(), regions.end(), [](const PlaneRegion& a, const PlaneRegion& b) {
    if (a.cluster.vertices.size() != b.cluster.vertices.size()) {
      return a.cluster.vertices.size() > b.cluster.vertices.size();
    }
    return a.cluster.plane_id < b.cluster.plane_id;
  });
  if (reports) reports->clear();
  for (const PlaneRegion& r : regions) {
    RegionReport rep;
    try {
      if (!r.basis.non_collinear()) {
        warn("plane " + std::to_string(r.cluster.plane_id) + ": collinear basis; region skipped");
        rep.plane_id = r.cluster.plane_id;
        rep.skipped = true;
      } else {
        remesh_region(work, classify_boundary_interior(work, r.cluster), r.basis.plane(), params, PatchPolicy{}, &rep);
      }
    } catch (const Error& e) {
      warn("plane " + std::to_string(r.cluster.plane_id) + ": " + e.what() + "; region skipped");
      rep.plane_id = r.cluster.plane_id;
      rep.skipped = true;
    }
    if (reports) reports->push_back(rep);
  }
  TriMesh out = compact(work);
  out.validate();
  return out;
}

std::size_t planar_vertex_count(const TriMesh& mesh) {
  return std::size_t(std::count_if(mesh.plane_id.begin(), mesh.plane_id.end(), [](int l) { return l != kNoPlane; }));
}

std::vector<Points3> plane_point_sets(std::span<const Vec3> points, std::span<const int> labels, int plane_count) {
  if (points.size() != labels.size()) throw Error(ErrorCode::DimensionMismatch, "label count differs from point count");
  std::vector<Points3> sets(std::max(plane_count, 0));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (labels[i] >= 0 && labels[i] < plane_count) sets[labels[i]].push_back(points[i]);
  }
  return sets;
}

std::vector<int> propagate_labels(std::span<const Vec3> dense, std::span<const Vec3> sparse,
                                  std::span<const int> sparse_labels, std::span<const PlaneEq> planes, double radius,
                                  double max_plane_distance, Exec exec) {
  if (sparse.size() != sparse_labels.size()) throw Error(ErrorCode::DimensionMismatch, "label count differs from point count");
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  std::vector<int> out(dense.size(), -1);
  Points3 pts;
  std::vector<int> labels;
  for (std::size_t i = 0; i < sparse.size(); ++i) {
    if (sparse_labels[i] >= 0 && sparse_labels[i] < int(planes.size())) {
      pts.push_back(sparse[i]);
      labels.push_back(sparse_labels[i]);
    }
  }
  if (pts.empty()) return out;
  const PointGrid grid(pts, radius);
  const std::int64_t n = std::int64_t(dense.size());
  auto label_one = [&](std::int64_t i) {
    const Vec3& p = dense[i];
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    auto consider = [&](int l) {
      const double d = std::abs(planes[l].signed_distance(p));
      if (d < best_d || (d == best_d && l < best)) {
        best_d = d;
        best = l;
      }
    };
    bool any = false;
    grid.for_each_within(p, radius, [&](int k, double) {
      any = true;
      consider(labels[k]);
    });
    if (!any) consider(labels[grid.nearest(p).index]);
    out[i] = best_d <= max_plane_distance ? best : -1;
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1024)
    for (std::int64_t i = 0; i < n; ++i) label_one(i);
  } else {
    for (std::int64_t i = 0; i < n; ++i) label_one(i);
  }
  return out;
}

}  // namespace planekit
