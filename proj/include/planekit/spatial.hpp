#pragma once

// Uniform-grid spatial indices: exact nearest neighbour and fixed-radius
// queries over points, and point-to-surface distance over triangles.

#include "planekit/common.hpp"
#include "planekit/mesh.hpp"
#include "planekit/parallel.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace planekit {

/// Axis-aligned cell layout shared by the two grids.
class GridLayout {
 public:
  GridLayout() = default;
  /// Cell size is enlarged if needed to keep at most `max_cells` cells.
  GridLayout(const Vec3& lo, const Vec3& hi, double cell, std::size_t max_cells);

  double cell() const { return cell_; }
  std::array<std::int64_t, 3> coords(const Vec3& p) const;
  bool inside(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return x >= 0 && y >= 0 && z >= 0 && x < dims_[0] && y < dims_[1] && z < dims_[2];
  }
  std::size_t index(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return std::size_t((z * dims_[1] + y) * dims_[0] + x);
  }
  std::size_t cell_count() const { return std::size_t(dims_[0] * dims_[1] * dims_[2]); }
  const std::array<std::int64_t, 3>& dims() const { return dims_; }
  /// Chebyshev distance (in cells) from c to the grid's cell range.
  std::int64_t distance_to_range(const std::array<std::int64_t, 3>& c) const;

  /// Calls f(cell_index) for every in-range cell at Chebyshev distance
  /// exactly k from c.
  template <class F>
  void for_ring(const std::array<std::int64_t, 3>& c, std::int64_t k, F&& f) const;

 private:
  Vec3 lo_ = Vec3::Zero();
  double cell_ = 1.0;
  std::array<std::int64_t, 3> dims_{1, 1, 1};
};

template <class F>
void GridLayout::for_ring(const std::array<std::int64_t, 3>& c, std::int64_t k, F&& f) const {
  const std::int64_t x0 = std::max<std::int64_t>(c[0] - k, 0), x1 = std::min<std::int64_t>(c[0] + k, dims_[0] - 1);
  const std::int64_t y0 = std::max<std::int64_t>(c[1] - k, 0), y1 = std::min<std::int64_t>(c[1] + k, dims_[1] - 1);
  for (std::int64_t x = x0; x <= x1; ++x) {
    for (std::int64_t y = y0; y <= y1; ++y) {
      const bool edge = std::abs(x - c[0]) == k || std::abs(y - c[1]) == k;
      if (edge) {
        const std::int64_t z0 = std::max<std::int64_t>(c[2] - k, 0), z1 = std::min<std::int64_t>(c[2] + k, dims_[2] - 1);
        for (std::int64_t z = z0; z <= z1; ++z) f(index(x, y, z));
      } else {
        if (c[2] - k >= 0 && c[2] - k < dims_[2]) f(index(x, y, c[2] - k));
        if (k > 0 && c[2] + k >= 0 && c[2] + k < dims_[2]) f(index(x, y, c[2] + k));
      }
    }
  }
}

struct NearestHit {
  int index = -1;
  double distance = 0.0;
};

/// Euclidean distance computed the same way everywhere (sqrt of the squared
/// norm), so grid and brute-force results agree bitwise.
inline double point_distance(const Vec3& a, const Vec3& b) { return std::sqrt((a - b).squaredNorm()); }

class PointGrid {
 public:
  PointGrid() = default;
  PointGrid(std::span<const Vec3> points, double cell);

  std::size_t size() const { return points_.size(); }
  const Points3& points() const { return points_; }

  /// Exact nearest point (smallest index on ties); index -1 when empty.
  NearestHit nearest(const Vec3& q) const;
  /// Calls f(index, squared_distance) for every point with |p - q| <= r.
  template <class F>
  void for_each_within(const Vec3& q, double r, F&& f) const;
  bool any_within(const Vec3& q, double r) const;

 private:
  Points3 points_;
  GridLayout layout_;
  std::vector<std::uint32_t> start_;
  std::vector<int> items_;
};

template <class F>
void PointGrid::for_each_within(const Vec3& q, double r, F&& f) const {
  if (points_.empty()) return;
  const auto lo = layout_.coords(q - Vec3::Constant(r));
  const auto hi = layout_.coords(q + Vec3::Constant(r));
  const double r2 = r * r;
  const auto& d = layout_.dims();
  for (std::int64_t z = std::max<std::int64_t>(lo[2], 0); z <= std::min<std::int64_t>(hi[2], d[2] - 1); ++z) {
    for (std::int64_t y = std::max<std::int64_t>(lo[1], 0); y <= std::min<std::int64_t>(hi[1], d[1] - 1); ++y) {
      for (std::int64_t x = std::max<std::int64_t>(lo[0], 0); x <= std::min<std::int64_t>(hi[0], d[0] - 1); ++x) {
        const std::size_t c = layout_.index(x, y, z);
        for (std::uint32_t k = start_[c]; k < start_[c + 1]; ++k) {
          const int i = items_[k];
          const double d2 = (points_[i] - q).squaredNorm();
          if (d2 <= r2) f(i, d2);
        }
      }
    }
  }
}

/// Nearest distances for many queries.
std::vector<double> nearest_distances(const PointGrid& grid, std::span<const Vec3> queries,
                                      Exec exec = Exec::Parallel);

/// Closest point on triangle abc to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

class TriangleGrid {
 public:
  TriangleGrid() = default;
  /// cell <= 0 picks the mean edge length.
  explicit TriangleGrid(const TriMesh& mesh, double cell = 0.0);

  bool empty() const { return faces_.empty(); }
  /// Exact distance from q to the surface (infinity when empty).
  double distance(const Vec3& q) const;

 private:
  Points3 vertices_;
  std::vector<Face> faces_;
  GridLayout layout_;
  std::vector<std::uint32_t> start_;
  std::vector<int> items_;
};

std::vector<double> surface_distances(const TriangleGrid& grid, std::span<const Vec3> queries,
                                      Exec exec = Exec::Parallel);

}  // namespace planekit
