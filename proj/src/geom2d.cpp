#include "planekit/geom2d.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace planekit {

PlaneFrame PlaneFrame::from_normal(const Vec3& origin, const Vec3& normal) {
  const Vec3 n = normal.normalized();
  const Vec3 a = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  PlaneFrame f;
  f.origin = origin;
  f.u = (a - a.dot(n) * n).normalized();
  f.v = n.cross(f.u);
  return f;
}

bool Rect2::contains(const Vec2& p, double eps) const {
  const Vec2 q = to_local(p);
  return std::abs(q.x()) <= half.x() + eps && std::abs(q.y()) <= half.y() + eps;
}

std::array<Vec2, 4> Rect2::corners() const {
  return {to_world({-half.x(), -half.y()}), to_world({half.x(), -half.y()}), to_world({half.x(), half.y()}),
          to_world({-half.x(), half.y()})};
}

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

double polygon_area(const Points2& polygon) {
  double a = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = polygon[i];
    const Vec2& q = polygon[(i + 1) % n];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

bool point_in_polygon(const Vec2& p, const Points2& polygon) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

std::vector<int> convex_hull(const Points2& points) {
  const int n = int(points.size());
  if (n < 3) throw Error(ErrorCode::Degenerate, "convex hull needs at least 3 points");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (points[a].x() != points[b].x()) return points[a].x() < points[b].x();
    if (points[a].y() != points[b].y()) return points[a].y() < points[b].y();
    return a < b;
  });
  std::vector<int> hull(2 * std::size_t(n));
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && orient2d(points[hull[k - 2]], points[hull[k - 1]], points[idx[i]]) <= 0.0) --k;
    hull[k++] = idx[i];
  }
  for (int i = n - 2, lower = k + 1; i >= 0; --i) {
    while (k >= lower && orient2d(points[hull[k - 2]], points[hull[k - 1]], points[idx[i]]) <= 0.0) --k;
    hull[k++] = idx[i];
  }
  hull.resize(std::size_t(std::max(0, k - 1)));
  if (hull.size() < 3) throw Error(ErrorCode::Degenerate, "convex hull of collinear points");
  return hull;
}

Rect2 bounding_rect(const Points2& points, const Vec2& u) {
  const Vec2 v(-u.y(), u.x());
  double lo_u = INFINITY, hi_u = -INFINITY, lo_v = INFINITY, hi_v = -INFINITY;
  for (const Vec2& p : points) {
    lo_u = std::min(lo_u, p.dot(u));
    hi_u = std::max(hi_u, p.dot(u));
    lo_v = std::min(lo_v, p.dot(v));
    hi_v = std::max(hi_v, p.dot(v));
  }
  Rect2 r;
  r.u = u;
  r.center = 0.5 * (lo_u + hi_u) * u + 0.5 * (lo_v + hi_v) * v;
  r.half = {0.5 * (hi_u - lo_u), 0.5 * (hi_v - lo_v)};
  return r;
}

namespace {

// Rotates the axes by multiples of 90 degrees so that u lies within
// (-45, 45] degrees of +x.
Rect2 canonical_axes(Rect2 r) {
  for (int k = 0; k < 4; ++k) {
    const double ang = std::atan2(r.u.y(), r.u.x());
    if (ang > -M_PI / 4 && ang <= M_PI / 4 + 1e-15) break;
    r.u = r.v();
    r.half = {r.half.y(), r.half.x()};
  }
  return r;
}

}  // namespace

Rect2 min_enclosing_rect(const Points2& points) {
  const std::vector<int> hi = convex_hull(points);
  const int h = int(hi.size());
  Points2 hull;
  hull.reserve(hi.size());
  for (int i : hi) hull.push_back(points[i]);

  auto dot_at = [&](int k, const Vec2& d) { return hull[k % h].dot(d); };
  int r = 1, t = 1, l = 1;
  double best_area = INFINITY;
  int best_edge = 0;
  for (int i = 0; i < h; ++i) {
    const Vec2 a = hull[i];
    const Vec2 d = (hull[(i + 1) % h] - a).normalized();
    const Vec2 nrm(-d.y(), d.x());
    if (i == 0) {
      r = 1;
    }
    for (int s = 0; s < h && dot_at(r + 1, d) >= dot_at(r, d); ++s) ++r;
    if (i == 0) t = r;
    for (int s = 0; s < h && dot_at(t + 1, nrm) >= dot_at(t, nrm); ++s) ++t;
    if (i == 0) l = t;
    for (int s = 0; s < h && dot_at(l + 1, d) <= dot_at(l, d); ++s) ++l;
    const double width = dot_at(r, d) - dot_at(l, d);
    const double height = dot_at(t, nrm) - a.dot(nrm);
    const double area = width * height;
    if (area < best_area) {
      best_area = area;
      best_edge = i;
    }
  }
  const Vec2 d = (hull[(best_edge + 1) % h] - hull[best_edge]).normalized();
  return canonical_axes(bounding_rect(hull, d));
}

Occupancy::Occupancy(const Rect2& rect, double cell, double pad) : rect_(rect), cell_(cell) {
  if (!(cell > 0.0)) throw Error(ErrorCode::InvalidArgument, "occupancy cell must be positive");
  if (!(pad >= 0.0)) throw Error(ErrorCode::InvalidArgument, "occupancy padding must be non-negative");
  const Vec2 ext = rect.half + Vec2(pad, pad);
  nx_ = std::max(1, int(std::ceil(2.0 * ext.x() / cell)));
  ny_ = std::max(1, int(std::ceil(2.0 * ext.y() / cell)));
  lo_ = -0.5 * cell * Vec2(nx_, ny_);
  occ_.assign(std::size_t(nx_) * ny_, 0);
}

std::optional<std::array<int, 2>> Occupancy::cell_of(const Vec2& p) const {
  const Vec2 q = rect_.to_local(p) - lo_;
  const double fx = std::floor(q.x() / cell_), fy = std::floor(q.y() / cell_);
  if (fx < 0 || fy < 0 || fx >= nx_ || fy >= ny_) return std::nullopt;
  return std::array<int, 2>{int(fx), int(fy)};
}

Vec2 Occupancy::cell_center(int ix, int iy) const {
  return rect_.to_world(lo_ + cell_ * Vec2(ix + 0.5, iy + 0.5));
}

bool Occupancy::occupied_at(const Vec2& p) const {
  const auto c = cell_of(p);
  return c && occupied((*c)[0], (*c)[1]);
}

std::size_t Occupancy::occupied_count() const {
  return std::size_t(std::count(occ_.begin(), occ_.end(), std::uint8_t(1)));
}

void Occupancy::stamp(const Points2& points, double radius, Exec exec) {
  if (occ_.empty()) return;
  const double r2 = radius * radius;
  std::vector<Vec2, Eigen::aligned_allocator<Vec2>> local;
  local.reserve(points.size());
  for (const Vec2& p : points) local.push_back(rect_.to_local(p) - lo_);

  auto col_range = [&](const Vec2& q, int& x0, int& x1) {
    x0 = std::max(0, int(std::floor((q.x() - radius) / cell_ - 0.5)));
    x1 = std::min(nx_ - 1, int(std::ceil((q.x() + radius) / cell_ - 0.5)));
  };
  auto stamp_row = [&](const Vec2& q, int iy) {
    const double dy = (iy + 0.5) * cell_ - q.y();
    if (dy * dy > r2) return;
    int x0, x1;
    col_range(q, x0, x1);
    std::uint8_t* row = occ_.data() + std::size_t(iy) * nx_;
    for (int ix = x0; ix <= x1; ++ix) {
      const double dx = (ix + 0.5) * cell_ - q.x();
      if (dx * dx + dy * dy <= r2) row[ix] = 1;
    }
  };
  auto row_range = [&](const Vec2& q, int& y0, int& y1) {
    y0 = std::max(0, int(std::floor((q.y() - radius) / cell_ - 0.5)));
    y1 = std::min(ny_ - 1, int(std::ceil((q.y() + radius) / cell_ - 0.5)));
  };

  if (exec == Exec::Serial) {
    for (const Vec2& q : local) {
      int y0, y1;
      row_range(q, y0, y1);
      for (int iy = y0; iy <= y1; ++iy) stamp_row(q, iy);
    }
    return;
  }
  // bucket points by the rows they touch, then stamp rows independently
  std::vector<std::vector<int>> rows(static_cast<std::size_t>(ny_));
  for (std::size_t i = 0; i < local.size(); ++i) {
    int y0, y1;
    row_range(local[i], y0, y1);
    for (int iy = y0; iy <= y1; ++iy) rows[iy].push_back(int(i));
  }
#pragma omp parallel for schedule(dynamic, 16)
  for (int iy = 0; iy < ny_; ++iy) {
    for (int i : rows[iy]) stamp_row(local[i], iy);
  }
}

Occupancy build_occupancy(const Points2& points, double cell, double stamp_radius, const Rect2& region, Exec exec) {
  if (!(cell > 0.0)) throw Error(ErrorCode::InvalidArgument, "occupancy cell must be positive");
  if (!(stamp_radius >= 0.5 * cell)) throw Error(ErrorCode::InvalidArgument, "stamp radius must be at least cell/2");
  Occupancy occ(region, cell, stamp_radius);
  occ.stamp(points, stamp_radius, exec);
  return occ;
}

Occupancy build_occupancy(const Points2& points, double cell, double stamp_radius, Exec exec) {
  Rect2 region;
  if (!points.empty()) {
    try {
      region = min_enclosing_rect(points);
    } catch (const Error&) {
      region = bounding_rect(points, Vec2::UnitX());
    }
  }
  return build_occupancy(points, cell, stamp_radius, region, exec);
}

// ---------------------------------------------------------------------------
// Delaunay: Bowyer-Watson with a symbolic vertex at infinity. Hull edges are
// closed by "ghost" triangles (a, b, kGhost); a point conflicts with a ghost
// when it lies strictly left of a->b or strictly inside the segment ab.

namespace {

constexpr int kGhost = -1;
using LD = long double;

struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> n;  ///< n[i] is across the edge opposite v[i]
  bool alive = true;
};

class Triangulator {
 public:
  Triangulator(const Points2& pts, double scale) : pts_(pts) {
    const LD s = scale;
    incircle_eps_ = 1e-18L * s * s * s * s;
  }

  LD orient(int a, int b, int c) const {
    const Vec2 &pa = pts_[a], &pb = pts_[b], &pc = pts_[c];
    return (LD(pb.x()) - pa.x()) * (LD(pc.y()) - pa.y()) - (LD(pb.y()) - pa.y()) * (LD(pc.x()) - pa.x());
  }

  LD incircle(int a, int b, int c, int d) const {
    const Vec2 &pa = pts_[a], &pb = pts_[b], &pc = pts_[c], &pd = pts_[d];
    const LD adx = LD(pa.x()) - pd.x(), ady = LD(pa.y()) - pd.y();
    const LD bdx = LD(pb.x()) - pd.x(), bdy = LD(pb.y()) - pd.y();
    const LD cdx = LD(pc.x()) - pd.x(), cdy = LD(pc.y()) - pd.y();
    const LD al = adx * adx + ady * ady, bl = bdx * bdx + bdy * bdy, cl = cdx * cdx + cdy * cdy;
    return al * (bdx * cdy - cdx * bdy) + bl * (cdx * ady - adx * cdy) + cl * (adx * bdy - bdx * ady);
  }

  static bool is_ghost(const Tri& t) { return t.v[0] == kGhost || t.v[1] == kGhost || t.v[2] == kGhost; }

  bool conflict(int ti, int p) const {
    const Tri& t = tris_[ti];
    if (!is_ghost(t)) return incircle(t.v[0], t.v[1], t.v[2], p) > incircle_eps_;
    int g = 0;
    while (t.v[g] != kGhost) ++g;
    const int a = t.v[(g + 1) % 3], b = t.v[(g + 2) % 3];
    const LD o = orient(a, b, p);
    if (o > 0) return true;
    if (o < 0) return false;
    const Vec2 &pa = pts_[a], &pb = pts_[b], &pp = pts_[p];
    return (pp - pa).dot(pb - pa) > 0.0 && (pp - pb).dot(pa - pb) > 0.0;
  }

  void init(int a, int b, int c) {
    if (orient(a, b, c) < 0) std::swap(b, c);
    // 0: real, 1: ghost on b->a, 2: ghost on c->b, 3: ghost on a->c
    tris_.push_back({{a, b, c}, {2, 3, 1}, true});
    tris_.push_back({{b, a, kGhost}, {3, 2, 0}, true});
    tris_.push_back({{c, b, kGhost}, {1, 3, 0}, true});
    tris_.push_back({{a, c, kGhost}, {2, 1, 0}, true});
    last_ = 0;
  }

  void insert(int p) {
    const int seed = locate(p);
    cavity_.clear();
    ++stamp_;
    mark_.resize(tris_.size(), 0);
    add_to_cavity(seed);
    for (std::size_t k = 0; k < cavity_.size(); ++k) {
      const Tri& t = tris_[cavity_[k]];
      for (int i = 0; i < 3; ++i) {
        const int nb = t.n[i];
        if (mark_[nb] != stamp_ && conflict(nb, p)) add_to_cavity(nb);
      }
    }
    // enlarge until every new real triangle is strictly CCW
    for (int round = 0;; ++round) {
      collect_boundary();
      bool grew = false;
      for (const auto& e : boundary_) {
        if (e.u != kGhost && e.w != kGhost && orient(e.u, e.w, p) <= 0) {
          if (mark_[e.outside] != stamp_) {
            add_to_cavity(e.outside);
            grew = true;
          }
        }
      }
      if (!grew) break;
      if (round > 64) throw Error(ErrorCode::Degenerate, "delaunay: cavity repair failed");
    }
    retriangulate(p);
  }

  std::vector<std::array<int, 3>> real_triangles() const {
    std::vector<std::array<int, 3>> out;
    for (const Tri& t : tris_) {
      if (t.alive && !is_ghost(t)) out.push_back(t.v);
    }
    return out;
  }

 private:
  struct BoundaryEdge {
    int u, w, outside;
  };

  void add_to_cavity(int ti) {
    mark_[ti] = stamp_;
    cavity_.push_back(ti);
  }

  int real_start() const {
    if (last_ >= 0 && tris_[last_].alive && !is_ghost(tris_[last_])) return last_;
    for (int i = int(tris_.size()) - 1; i >= 0; --i) {
      if (tris_[i].alive && !is_ghost(tris_[i])) return i;
    }
    return 0;
  }

  int locate(int p) {
    int t = real_start();
    const int limit = 4 * int(tris_.size()) + 16;
    for (int step = 0; step < limit; ++step) {
      const Tri& tr = tris_[t];
      if (is_ghost(tr)) {
        if (conflict(t, p)) return t;
        break;
      }
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        const int i = (k + step) % 3;
        if (orient(tr.v[(i + 1) % 3], tr.v[(i + 2) % 3], p) < 0) {
          next = tr.n[i];
          break;
        }
      }
      if (next < 0) {
        if (conflict(t, p)) return t;
        break;
      }
      t = next;
    }
    // robust fallback
    for (int i = 0; i < int(tris_.size()); ++i) {
      if (tris_[i].alive && !is_ghost(tris_[i]) && conflict(i, p)) return i;
    }
    for (int i = 0; i < int(tris_.size()); ++i) {
      if (tris_[i].alive && conflict(i, p)) return i;
    }
    throw Error(ErrorCode::Degenerate, "delaunay: point location failed");
  }

  void collect_boundary() {
    boundary_.clear();
    for (int ti : cavity_) {
      const Tri& t = tris_[ti];
      for (int i = 0; i < 3; ++i) {
        if (mark_[t.n[i]] != stamp_) boundary_.push_back({t.v[(i + 1) % 3], t.v[(i + 2) % 3], t.n[i]});
      }
    }
  }

  void retriangulate(int p) {
    collect_boundary();
    std::unordered_map<int, int> by_start, by_end;
    by_start.reserve(boundary_.size() * 2);
    by_end.reserve(boundary_.size() * 2);
    for (const auto& e : boundary_) {
      if (by_start.count(e.u) || by_end.count(e.w)) {
        throw Error(ErrorCode::Degenerate, "delaunay: non-simple cavity");
      }
      by_start[e.u] = -1;
      by_end[e.w] = -1;
    }
    // vertices strictly inside the cavity would be lost
    for (int ti : cavity_) {
      for (int x : tris_[ti].v) {
        if (x != kGhost && !by_start.count(x)) throw Error(ErrorCode::Degenerate, "delaunay: cavity swallowed a vertex");
      }
    }
    for (int ti : cavity_) tris_[ti].alive = false;
    std::vector<int> created;
    created.reserve(boundary_.size());
    for (const auto& e : boundary_) {
      const int id = int(tris_.size());
      tris_.push_back({{e.u, e.w, p}, {-1, -1, e.outside}, true});
      Tri& out = tris_[e.outside];
      for (int i = 0; i < 3; ++i) {
        if (out.v[i] != e.u && out.v[i] != e.w) out.n[i] = id;
      }
      by_start[e.u] = id;
      by_end[e.w] = id;
      created.push_back(id);
    }
    for (int id : created) {
      Tri& t = tris_[id];
      t.n[0] = by_start.at(t.v[1]);  // across (w, p)
      t.n[1] = by_end.at(t.v[0]);    // across (p, u)
      if (!is_ghost(t)) last_ = id;
    }
    mark_.resize(tris_.size(), 0);
  }

  const Points2& pts_;
  LD incircle_eps_ = 0;
  std::vector<Tri> tris_;
  std::vector<int> mark_;
  int stamp_ = 0;
  std::vector<int> cavity_;
  std::vector<BoundaryEdge> boundary_;
  int last_ = 0;
};

}  // namespace

Tri2Mesh delaunay(const Points2& points) {
  const int n = int(points.size());
  if (n < 3) throw Error(ErrorCode::Degenerate, "delaunay needs at least 3 points");
  Tri2Mesh out;
  out.points = points;
  out.representative.resize(std::size_t(n));

  // merge duplicates within 1e-9
  const double q = 1e-9;
  struct KeyHash {
    std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& k) const {
      return std::hash<std::int64_t>()(k.first * 73856093LL) ^ std::hash<std::int64_t>()(k.second * 19349663LL);
    }
  };
  std::unordered_map<std::pair<std::int64_t, std::int64_t>, std::vector<int>, KeyHash> grid;
  std::vector<int> unique;
  Vec2 lo = points[0], hi = points[0];
  for (int i = 0; i < n; ++i) {
    const Vec2& p = points[i];
    if (!std::isfinite(p.x()) || !std::isfinite(p.y())) throw Error(ErrorCode::InvalidArgument, "delaunay: non-finite point");
    const std::int64_t kx = std::int64_t(std::floor(p.x() / q)), ky = std::int64_t(std::floor(p.y() / q));
    int rep = -1;
    for (std::int64_t dx = -1; dx <= 1 && rep < 0; ++dx) {
      for (std::int64_t dy = -1; dy <= 1 && rep < 0; ++dy) {
        auto it = grid.find({kx + dx, ky + dy});
        if (it == grid.end()) continue;
        for (int j : it->second) {
          if ((points[j] - p).norm() <= q) {
            rep = j;
            break;
          }
        }
      }
    }
    if (rep < 0) {
      rep = i;
      grid[{kx, ky}].push_back(i);
      unique.push_back(i);
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    out.representative[i] = rep;
  }
  const double scale = std::max((hi - lo).norm(), 1e-300);

  Triangulator tri(points, scale);
  if (unique.size() < 3) throw Error(ErrorCode::Degenerate, "delaunay: all points collinear");
  int third = -1;
  for (std::size_t k = 2; k < unique.size(); ++k) {
    if (tri.orient(unique[0], unique[1], unique[k]) != 0) {
      third = int(k);
      break;
    }
  }
  if (third < 0) throw Error(ErrorCode::Degenerate, "delaunay: all points collinear");
  tri.init(unique[0], unique[1], unique[third]);
  for (std::size_t k = 2; k < unique.size(); ++k) {
    if (int(k) != third) tri.insert(unique[k]);
  }

  for (const auto& t : tri.real_triangles()) {
    // near-collinear slivers are kept: dropping them would open gaps
    if (tri.orient(t[0], t[1], t[2]) > 0) out.triangles.push_back(t);
  }
  return out;
}

}  // namespace planekit
