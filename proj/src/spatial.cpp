#include "planekit/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace planekit {

GridLayout::GridLayout(const Vec3& lo, const Vec3& hi, double cell, std::size_t max_cells) : lo_(lo) {
  if (!(cell > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid cell must be positive");
  const Vec3 ext = (hi - lo).cwiseMax(Vec3::Zero());
  for (;;) {
    for (int a = 0; a < 3; ++a) dims_[a] = std::int64_t(std::floor(ext[a] / cell)) + 1;
    const double total = double(dims_[0]) * double(dims_[1]) * double(dims_[2]);
    if (total <= double(std::max<std::size_t>(max_cells, 1))) break;
    cell *= 1.25;
  }
  cell_ = cell;
}

std::array<std::int64_t, 3> GridLayout::coords(const Vec3& p) const {
  std::array<std::int64_t, 3> c{};
  for (int a = 0; a < 3; ++a) {
    const double f = std::floor((p[a] - lo_[a]) / cell_);
    c[a] = std::int64_t(std::clamp(f, -1e15, 1e15));
  }
  return c;
}

std::int64_t GridLayout::distance_to_range(const std::array<std::int64_t, 3>& c) const {
  std::int64_t d = 0;
  for (int a = 0; a < 3; ++a) {
    if (c[a] < 0) d = std::max(d, -c[a]);
    if (c[a] >= dims_[a]) d = std::max(d, c[a] - dims_[a] + 1);
  }
  return d;
}

namespace {

template <class CellOf>
void bucket(std::size_t n, std::size_t cells, CellOf&& cell_of, std::vector<std::uint32_t>& start,
            std::vector<int>& items) {
  start.assign(cells + 1, 0);
  for (std::size_t i = 0; i < n; ++i) ++start[cell_of(i) + 1];
  for (std::size_t c = 0; c < cells; ++c) start[c + 1] += start[c];
  items.assign(n, 0);
  std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
  for (std::size_t i = 0; i < n; ++i) items[fill[cell_of(i)]++] = int(i);
}

std::int64_t max_ring(const GridLayout& layout, const std::array<std::int64_t, 3>& c) {
  std::int64_t k = 0;
  for (int a = 0; a < 3; ++a) k = std::max({k, std::abs(c[a]), std::abs(layout.dims()[a] - 1 - c[a])});
  return k;
}

}  // namespace

PointGrid::PointGrid(std::span<const Vec3> points, double cell) : points_(points.begin(), points.end()) {
  if (points_.empty()) return;
  Vec3 lo = points_[0], hi = points_[0];
  for (const Vec3& p : points_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  layout_ = GridLayout(lo, hi, cell, 4 * points_.size() + 1024);
  bucket(
      points_.size(), layout_.cell_count(),
      [&](std::size_t i) {
        const auto c = layout_.coords(points_[i]);
        return layout_.index(c[0], c[1], c[2]);
      },
      start_, items_);
}

NearestHit PointGrid::nearest(const Vec3& q) const {
  NearestHit best;
  if (points_.empty()) return best;
  best.distance = std::numeric_limits<double>::infinity();
  const auto c = layout_.coords(q);
  const std::int64_t k_end = max_ring(layout_, c);
  for (std::int64_t k = layout_.distance_to_range(c); k <= k_end; ++k) {
    layout_.for_ring(c, k, [&](std::size_t cell) {
      for (std::uint32_t s = start_[cell]; s < start_[cell + 1]; ++s) {
        const int i = items_[s];
        const double d = point_distance(points_[i], q);
        if (d < best.distance || (d == best.distance && i < best.index)) {
          best.distance = d;
          best.index = i;
        }
      }
    });
    // anything in ring k+1 or beyond is at least k cells away
    if (best.index >= 0 && best.distance < double(k) * layout_.cell()) break;
  }
  return best;
}

bool PointGrid::any_within(const Vec3& q, double r) const {
  bool found = false;
  for_each_within(q, r, [&](int, double) { found = true; });
  return found;
}

std::vector<double> nearest_distances(const PointGrid& grid, std::span<const Vec3> queries, Exec exec) {
  std::vector<double> out(queries.size());
  const std::int64_t n = std::int64_t(queries.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 256)
    for (std::int64_t i = 0; i < n; ++i) out[i] = grid.nearest(queries[i]).distance;
  } else {
    for (std::int64_t i = 0; i < n; ++i) out[i] = grid.nearest(queries[i]).distance;
  }
  return out;
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

TriangleGrid::TriangleGrid(const TriMesh& mesh, double cell) : vertices_(mesh.vertices), faces_(mesh.faces) {
  if (faces_.empty()) return;
  if (!(cell > 0.0)) cell = std::max(mean_edge_length(mesh), 1e-6);
  Vec3 lo = Vec3::Constant(INFINITY), hi = Vec3::Constant(-INFINITY);
  for (const Face& f : faces_) {
    for (int v : f) {
      lo = lo.cwiseMin(vertices_[v]);
      hi = hi.cwiseMax(vertices_[v]);
    }
  }
  layout_ = GridLayout(lo, hi, cell, 8 * faces_.size() + 1024);
  // (cell, face) pairs for every cell overlapping the face's box
  std::vector<std::pair<std::size_t, int>> pairs;
  for (int f = 0; f < int(faces_.size()); ++f) {
    Vec3 flo = vertices_[faces_[f][0]], fhi = flo;
    for (int v : faces_[f]) {
      flo = flo.cwiseMin(vertices_[v]);
      fhi = fhi.cwiseMax(vertices_[v]);
    }
    const auto c0 = layout_.coords(flo), c1 = layout_.coords(fhi);
    for (std::int64_t z = c0[2]; z <= c1[2]; ++z) {
      for (std::int64_t y = c0[1]; y <= c1[1]; ++y) {
        for (std::int64_t x = c0[0]; x <= c1[0]; ++x) pairs.emplace_back(layout_.index(x, y, z), f);
      }
    }
  }
  bucket(
      pairs.size(), layout_.cell_count(), [&](std::size_t i) { return pairs[i].first; }, start_, items_);
  for (auto& it : items_) it = pairs[it].second;
}

double TriangleGrid::distance(const Vec3& q) const {
  double best = std::numeric_limits<double>::infinity();
  if (faces_.empty()) return best;
  const auto c = layout_.coords(q);
  const std::int64_t k_end = max_ring(layout_, c);
  for (std::int64_t k = layout_.distance_to_range(c); k <= k_end; ++k) {
    layout_.for_ring(c, k, [&](std::size_t cell) {
      for (std::uint32_t s = start_[cell]; s < start_[cell + 1]; ++s) {
        const Face& f = faces_[items_[s]];
        const Vec3 cp = closest_point_on_triangle(q, vertices_[f[0]], vertices_[f[1]], vertices_[f[2]]);
        best = std::min(best, point_distance(cp, q));
      }
    });
    if (best < double(k) * layout_.cell()) break;
  }
  return best;
}

std::vector<double> surface_distances(const TriangleGrid& grid, std::span<const Vec3> queries, Exec exec) {
  std::vector<double> out(queries.size());
  const std::int64_t n = std::int64_t(queries.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 256)
    for (std::int64_t i = 0; i < n; ++i) out[i] = grid.distance(queries[i]);
  } else {
    for (std::int64_t i = 0; i < n; ++i) out[i] = grid.distance(queries[i]);
  }
  return out;
}

}  // namespace planekit
