#include "planekit/mesh.hpp"

#include "planekit/geom2d.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace planekit {

void TriMesh::validate() const {
  const int n = int(vertices.size());
  for (const Face& f : faces) {
    for (int v : f) {
      if (v < 0 || v >= n) throw Error(ErrorCode::InvalidArgument, "face index out of range");
    }
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) throw Error(ErrorCode::InvalidArgument, "degenerate face");
  }
  if (!plane_id.empty() && plane_id.size() != vertices.size()) {
    throw Error(ErrorCode::DimensionMismatch, "plane label count differs from vertex count");
  }
}

Vec3 face_normal(const TriMesh& mesh, int f) {
  const Face& t = mesh.faces[f];
  return (mesh.vertices[t[1]] - mesh.vertices[t[0]]).cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]);
}

double face_area(const TriMesh& mesh, int f) { return 0.5 * face_normal(mesh, f).norm(); }

double surface_area(const TriMesh& mesh) {
  double a = 0.0;
  for (int f = 0; f < int(mesh.faces.size()); ++f) a += face_area(mesh, f);
  return a;
}

std::vector<std::vector<int>> vertex_neighbors(const TriMesh& mesh) {
  std::vector<std::vector<int>> nb(mesh.vertices.size());
  for (const Face& f : mesh.faces) {
    for (int i = 0; i < 3; ++i) {
      nb[f[i]].push_back(f[(i + 1) % 3]);
      nb[f[i]].push_back(f[(i + 2) % 3]);
    }
  }
  for (auto& l : nb) {
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
  }
  return nb;
}

std::vector<std::array<int, 2>> open_edges(std::span<const Face> faces) {
  std::unordered_map<std::uint64_t, int> count;
  count.reserve(faces.size() * 3);
  for (const Face& f : faces) {
    for (int i = 0; i < 3; ++i) ++count[edge_key(f[i], f[(i + 1) % 3])];
  }
  std::vector<std::array<int, 2>> out;
  for (const Face& f : faces) {
    for (int i = 0; i < 3; ++i) {
      if (count[edge_key(f[i], f[(i + 1) % 3])] == 1) out.push_back({f[i], f[(i + 1) % 3]});
    }
  }
  return out;
}

std::vector<std::vector<int>> chain_loops(const std::vector<std::array<int, 2>>& edges, const Points3& vertices,
                                          const Vec3& normal, bool* non_manifold) {
  if (non_manifold) *non_manifold = false;
  std::unordered_map<int, std::vector<int>> out_edges;  // vertex -> edge ids
  for (int e = 0; e < int(edges.size()); ++e) out_edges[edges[e][0]].push_back(e);
  const bool use_angle = normal.squaredNorm() > 0.0;
  PlaneFrame frame;
  if (use_angle) frame = PlaneFrame::from_normal(Vec3::Zero(), normal);

  std::vector<char> used(edges.size(), 0);
  std::vector<std::vector<int>> loops;
  for (int start = 0; start < int(edges.size()); ++start) {
    if (used[start]) continue;
    std::vector<int> loop;
    int e = start;
    while (true) {
      used[e] = 1;
      loop.push_back(edges[e][0]);
      const int at = edges[e][1];
      if (at == edges[start][0]) break;
      auto it = out_edges.find(at);
      int next = -1;
      if (it != out_edges.end()) {
        std::vector<int> cand;
        for (int c : it->second) {
          if (!used[c]) cand.push_back(c);
        }
        if (cand.size() == 1 || (!cand.empty() && !use_angle)) {
          next = cand.front();
        } else if (!cand.empty()) {
          if (non_manifold) *non_manifold = true;
          // most counter-clockwise turn relative to the reversed incoming edge
          const Vec2 here = frame.to_local(vertices[at]);
          const Vec2 back = frame.to_local(vertices[edges[e][0]]) - here;
          double best = -1.0;
          for (int c : cand) {
            const Vec2 d = frame.to_local(vertices[edges[c][1]]) - here;
            double ang = std::atan2(back.x() * d.y() - back.y() * d.x(), back.dot(d));
            if (ang <= 0.0) ang += 2.0 * M_PI;
            // largest ccw angle = smallest clockwise sweep from the reversed
            // edge, which stays on the face sector left of the incoming edge
            if (ang > best) {
              best = ang;
              next = c;
            }
          }
        }
      }
      if (next < 0) break;  // open chain; keep what was walked
      e = next;
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

namespace {

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

std::vector<int> connected_components(const TriMesh& mesh, int* count) {
  const int n = int(mesh.vertices.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (const Face& f : mesh.faces) {
    for (int i = 1; i < 3; ++i) {
      int a = find_root(parent, f[0]), b = find_root(parent, f[i]);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<int> comp(n, -1), id_of_root(n, -1);
  int next = 0;
  for (int v = 0; v < n; ++v) {
    const int r = find_root(parent, v);
    if (id_of_root[r] < 0) id_of_root[r] = next++;
    comp[v] = id_of_root[r];
  }
  if (count) *count = next;
  return comp;
}

TriMesh compact(const TriMesh& mesh, std::vector<int>* remap) {
  std::vector<int> map(mesh.vertices.size(), -1);
  for (const Face& f : mesh.faces) {
    for (int v : f) map[v] = 0;
  }
  TriMesh out;
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    if (map[v] < 0) continue;
    map[v] = int(out.vertices.size());
    out.vertices.push_back(mesh.vertices[v]);
    if (mesh.has_labels()) out.plane_id.push_back(mesh.plane_id[v]);
  }
  out.faces.reserve(mesh.faces.size());
  for (const Face& f : mesh.faces) out.faces.push_back({map[f[0]], map[f[1]], map[f[2]]});
  if (remap) *remap = std::move(map);
  return out;
}

TriMesh extract_faces(const TriMesh& mesh, std::span<const int> faces) {
  TriMesh sub;
  sub.vertices = mesh.vertices;
  sub.plane_id = mesh.plane_id;
  sub.faces.reserve(faces.size());
  for (int f : faces) sub.faces.push_back(mesh.faces[f]);
  return compact(sub);
}

TriMesh merge_meshes(const TriMesh& a, const TriMesh& b) {
  TriMesh out = a;
  const int off = int(a.vertices.size());
  out.vertices.insert(out.vertices.end(), b.vertices.begin(), b.vertices.end());
  for (const Face& f : b.faces) out.faces.push_back({f[0] + off, f[1] + off, f[2] + off});
  if (a.has_labels() && b.has_labels()) {
    out.plane_id.insert(out.plane_id.end(), b.plane_id.begin(), b.plane_id.end());
  } else {
    out.plane_id.clear();
  }
  return out;
}

double mean_edge_length(const TriMesh& mesh) {
  std::unordered_set<std::uint64_t> seen;
  double sum = 0.0;
  std::size_t n = 0;
  for (const Face& f : mesh.faces) {
    for (int i = 0; i < 3; ++i) {
      if (seen.insert(edge_key(f[i], f[(i + 1) % 3])).second) {
        sum += (mesh.vertices[f[i]] - mesh.vertices[f[(i + 1) % 3]]).norm();
        ++n;
      }
    }
  }
  return n ? sum / double(n) : 0.0;
}

long euler_characteristic(const TriMesh& mesh) {
  std::unordered_set<std::uint64_t> edges;
  std::vector<char> used(mesh.vertices.size(), 0);
  for (const Face& f : mesh.faces) {
    for (int i = 0; i < 3; ++i) {
      edges.insert(edge_key(f[i], f[(i + 1) % 3]));
      used[f[i]] = 1;
    }
  }
  const long v = long(std::count(used.begin(), used.end(), char(1)));
  return v - long(edges.size()) + long(mesh.faces.size());
}

}  // namespace planekit
