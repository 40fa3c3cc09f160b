#include "planekit/spc.hpp"

#include <algorithm>
#include <cmath>
#include <list>
#include <set>

namespace planekit {

std::vector<BoundaryLoop> extract_loops(const TriMesh& mesh, const PlaneVertexCluster& cluster) {
  std::vector<char> member(mesh.vertices.size(), 0);
  for (int v : cluster.vertices) member[v] = 1;
  std::vector<Face> faces;
  Vec3 normal = Vec3::Zero();
  for (int f = 0; f < int(mesh.faces.size()); ++f) {
    const Face& t = mesh.faces[f];
    if (member[t[0]] && member[t[1]] && member[t[2]]) {
      faces.push_back(t);
      normal += face_normal(mesh, f);
    }
  }
  const auto edges = open_edges(faces);
  bool non_manifold = false;
  const auto chains = chain_loops(edges, mesh.vertices, normal, &non_manifold);
  if (non_manifold) warn("plane " + std::to_string(cluster.plane_id) + ": non-manifold boundary split by angle");
  std::vector<BoundaryLoop> loops;
  for (const auto& c : chains) {
    if (c.size() >= 3) loops.push_back({c, LoopKind::Hole, 0.0});
  }
  return loops;
}

void classify_loops(std::vector<BoundaryLoop>& loops, const TriMesh& mesh, const PlaneFrame& frame) {
  int outer = -1;
  double best = -1.0;
  for (int i = 0; i < int(loops.size()); ++i) {
    Points2 poly;
    for (int v : loops[i].vertices) poly.push_back(frame.to_local(mesh.vertices[v]));
    loops[i].area = polygon_area(poly);
    loops[i].kind = LoopKind::Hole;
    if (std::abs(loops[i].area) > best) {
      best = std::abs(loops[i].area);
      outer = i;
    }
  }
  if (outer >= 0) loops[outer].kind = LoopKind::Outer;
}

std::size_t absorb_flat_holes(const TriMesh& mesh, PlaneVertexCluster& cluster, const PlaneEq& plane, double tolerance) {
  auto loops = extract_loops(mesh, cluster);
  classify_loops(loops, mesh, PlaneFrame::from_normal(Vec3::Zero(), plane.normal));
  std::vector<char> member(mesh.vertices.size(), 0), seen(mesh.vertices.size(), 0);
  for (int v : cluster.vertices) member[v] = 1;
  const auto nb = vertex_neighbors(mesh);
  std::size_t added = 0;
  for (const BoundaryLoop& loop : loops) {
    if (loop.kind != LoopKind::Hole) continue;
    // flood through non-cluster vertices reachable from the loop
    std::vector<int> region, stack;
    for (int v : loop.vertices) {
      for (int w : nb[v]) {
        if (!member[w] && !seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
    bool flat = true;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      region.push_back(v);
      if (!(std::abs(plane.signed_distance(mesh.vertices[v])) <= tolerance)) flat = false;
      for (int w : nb[v]) {
        if (!member[w] && !seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
    if (!flat || region.empty()) continue;
    for (int v : region) {
      member[v] = 1;
      cluster.vertices.push_back(v);
    }
    added += region.size();
  }
  if (added) cluster = classify_boundary_interior(mesh, cluster);
  return added;
}

std::size_t prune_pinches(const TriMesh& mesh, PlaneVertexCluster& cluster) {
  std::vector<char> member(mesh.vertices.size(), 0);
  for (int v : cluster.vertices) member[v] = 1;
  std::size_t removed = 0;
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<std::vector<int>> fan(mesh.vertices.size());
    for (int f = 0; f < int(mesh.faces.size()); ++f) {
      const Face& t = mesh.faces[f];
      if (member[t[0]] && member[t[1]] && member[t[2]]) {
        for (int v : t) fan[v].push_back(f);
      }
    }
    for (int v = 0; v < int(mesh.vertices.size()); ++v) {
      if (!member[v]) continue;
      // faces around v, joined when they share an edge through v
      const auto& fs = fan[v];
      std::vector<int> parent(fs.size());
      for (std::size_t i = 0; i < fs.size(); ++i) parent[i] = int(i);
      auto find = [&](int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
      };
      for (std::size_t i = 0; i < fs.size(); ++i) {
        for (std::size_t j = i + 1; j < fs.size(); ++j) {
          int shared = 0;
          for (int a : mesh.faces[fs[i]]) {
            for (int b : mesh.faces[fs[j]]) shared += a == b;
          }
          if (shared >= 2) parent[find(int(i))] = find(int(j));
        }
      }
      int parts = 0;
      for (std::size_t i = 0; i < fs.size(); ++i) parts += find(int(i)) == int(i);
      if (parts != 1) {
        member[v] = 0;
        ++removed;
        changed = true;
      }
    }
  }
  if (removed) {
    std::vector<int> kept;
    for (int v : cluster.vertices) {
      if (member[v]) kept.push_back(v);
    }
    cluster.vertices = std::move(kept);
    cluster = classify_boundary_interior(mesh, cluster);
  }
  return removed;
}

TriMesh correct_supportive_plane(const TriMesh& mesh, const PlaneVertexCluster& cluster_in, const PlaneBasis& basis,
                                 const RefineParams& params, SupportExtent extent, RegionReport* report) {
  mesh.validate();
  params.validate();
  PlaneVertexCluster cluster = classify_boundary_interior(mesh, cluster_in);
  const PlaneEq plane = basis.plane();
  absorb_flat_holes(mesh, cluster, plane, 3.0 * params.delta);
  prune_pinches(mesh, cluster);
  auto loops = extract_loops(mesh, cluster);
  if (loops.empty()) throw Error(ErrorCode::InvalidArgument, "not a supportive plane candidate");
  classify_loops(loops, mesh, PlaneFrame::from_normal(Vec3::Zero(), plane.normal));

  PatchPolicy policy;
  policy.extent = extent == SupportExtent::Mer ? PatchExtent::Rect : PatchExtent::Polygon;
  for (const BoundaryLoop& l : loops) {
    if (l.kind == LoopKind::Outer) {
      policy.clip_loop = l.vertices;
    } else {
      policy.fill_loops.push_back(l.vertices);
    }
  }
  TriMesh work = mesh;
  if (!work.has_labels()) work.plane_id.assign(mesh.vertices.size(), kNoPlane);
  if (!remesh_region(work, cluster, plane, params, policy, report)) {
    throw Error(ErrorCode::Degenerate, "supportive plane " + std::to_string(cluster.plane_id) + " could not be rebuilt");
  }
  return compact(work);
}

DetachResult detach_object(const TriMesh& mesh, const std::vector<int>& supportive_ids) {
  mesh.validate();
  const std::set<int> ids(supportive_ids.begin(), supportive_ids.end());
  auto supportive = [&](int v) { return ids.count(mesh.label(v)) > 0; };
  int count = 0;
  const auto comp = connected_components(mesh, &count);
  std::vector<char> has_patch(count, 0);
  std::vector<std::set<int>> touches(count);
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    if (supportive(int(v))) touches[comp[v]].insert(mesh.label(int(v)));
  }
  for (const Face& f : mesh.faces) {
    if (supportive(f[0]) && mesh.label(f[0]) == mesh.label(f[1]) && mesh.label(f[1]) == mesh.label(f[2])) {
      has_patch[comp[f[0]]] = 1;
    }
  }
  std::vector<int> object_index(count, -1);
  int objects = 0;
  for (int c = 0; c < count; ++c) {
    if (has_patch[c] || touches[c].empty()) continue;
    if (touches[c].size() > 1) warn("object touches " + std::to_string(touches[c].size()) + " supportive planes");
    object_index[c] = objects++;
  }
  std::vector<int> scene_faces;
  std::vector<std::vector<int>> object_faces(objects);
  for (int f = 0; f < int(mesh.faces.size()); ++f) {
    const int o = object_index[comp[mesh.faces[f][0]]];
    (o < 0 ? scene_faces : object_faces[o]).push_back(f);
  }
  DetachResult out;
  out.scene = extract_faces(mesh, scene_faces);
  for (const auto& fs : object_faces) out.objects.push_back(extract_faces(mesh, fs));
  return out;
}

namespace {

bool in_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
  return orient2d(a, b, p) >= 0.0 && orient2d(b, c, p) >= 0.0 && orient2d(c, a, p) >= 0.0;
}

}  // namespace

std::vector<std::array<int, 3>> ear_clip(const Points2& polygon) {
  std::vector<std::array<int, 3>> out;
  std::vector<int> idx(polygon.size());
  for (int i = 0; i < int(idx.size()); ++i) idx[i] = i;
  while (idx.size() > 3) {
    const int n = int(idx.size());
    int ear = -1;
    double fallback_turn = -INFINITY;
    int fallback = -1;
    for (int i = 0; i < n && ear < 0; ++i) {
      const int a = idx[(i + n - 1) % n], b = idx[i], c = idx[(i + 1) % n];
      const double turn = orient2d(polygon[a], polygon[b], polygon[c]);
      if (turn > fallback_turn) {
        fallback_turn = turn;
        fallback = i;
      }
      if (turn <= 0.0) continue;
      bool blocked = false;
      for (int j = 0; j < n && !blocked; ++j) {
        const int p = idx[j];
        if (p == a || p == b || p == c) continue;
        if (polygon[p] == polygon[a] || polygon[p] == polygon[b] || polygon[p] == polygon[c]) continue;
        blocked = in_triangle(polygon[p], polygon[a], polygon[b], polygon[c]);
      }
      if (!blocked) ear = i;
    }
    if (ear < 0) ear = fallback;  // numerically stuck: clip the sharpest convex corner
    const int a = idx[(ear + n - 1) % n], b = idx[ear], c = idx[(ear + 1) % n];
    out.push_back({a, b, c});
    idx.erase(idx.begin() + ear);
  }
  if (idx.size() == 3) out.push_back({idx[0], idx[1], idx[2]});
  return out;
}

TriMesh seal_contact(const TriMesh& object, const PlaneEq& plane, double delta, SealReport* report) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  object.validate();
  TriMesh out = object;
  SealReport rep;
  const auto edges = open_edges(out.faces);
  // caps face -normal, so the object's border runs clockwise seen from +normal
  const auto loops = chain_loops(edges, out.vertices, -plane.normal);
  const PlaneFrame frame = PlaneFrame::from_normal(Vec3::Zero(), -plane.normal);
  for (const auto& loop : loops) {
    if (loop.size() < 3) continue;
    bool near = true;
    for (int v : loop) {
      if (!(std::abs(plane.signed_distance(out.vertices[v])) <= 1.5 * delta)) near = false;
    }
    if (!near) {
      warn("contact loop farther than 1.5 delta from the plane; skipped");
      ++rep.loops_skipped;
      continue;
    }
    for (int v : loop) out.vertices[v] = plane.project(out.vertices[v]);
    std::vector<int> ring = loop;
    Points2 poly;
    for (int v : ring) poly.push_back(frame.to_local(out.vertices[v]));
    if (polygon_area(poly) < 0.0) {
      std::reverse(ring.begin(), ring.end());
      std::reverse(poly.begin(), poly.end());
    }
    const int n = int(ring.size());
    double scale = 0.0;
    for (const Vec2& p : poly) scale = std::max(scale, p.cwiseAbs().maxCoeff());
    bool convex = true;
    for (int i = 0; i < n && convex; ++i) {
      if (orient2d(poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n]) < -1e-12 * scale * scale) convex = false;
    }
    if (convex) {
      Vec3 c = Vec3::Zero();
      for (int v : ring) c += out.vertices[v];
      const int ci = int(out.vertices.size());
      out.vertices.push_back(plane.project(c / double(n)));
      if (out.has_labels()) out.plane_id.push_back(kNoPlane);
      for (int i = 0; i < n; ++i) {
        out.faces.push_back({ci, ring[i], ring[(i + 1) % n]});
        ++rep.cap_faces;
      }
    } else {
      for (const auto& t : ear_clip(poly)) {
        out.faces.push_back({ring[t[0]], ring[t[1]], ring[t[2]]});
        ++rep.cap_faces;
      }
    }
    ++rep.loops_sealed;
  }
  if (report) *report = rep;
  return out;
}

}  // namespace planekit
