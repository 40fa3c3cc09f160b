#pragma once

// 2D kernels used when re-meshing planar regions: convex hull, minimum
// enclosing rectangle, occupancy raster and Delaunay triangulation.

#include "planekit/common.hpp"
#include "planekit/parallel.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace planekit {

/// Right-handed in-plane frame: u x v = normal.
struct PlaneFrame {
  Vec3 origin = Vec3::Zero();
  Vec3 u = Vec3::UnitX();
  Vec3 v = Vec3::UnitY();

  Vec3 normal() const { return u.cross(v); }
  Vec2 to_local(const Vec3& p) const { return {(p - origin).dot(u), (p - origin).dot(v)}; }
  Vec3 to_world(const Vec2& q) const { return origin + q.x() * u + q.y() * v; }

  /// Deterministic frame for a unit normal.
  static PlaneFrame from_normal(const Vec3& origin, const Vec3& normal);
};

struct Rect2 {
  Vec2 center = Vec2::Zero();
  Vec2 u = Vec2::UnitX();  ///< first axis; v is u rotated by +90 degrees
  Vec2 half = Vec2::Zero();

  Vec2 v() const { return {-u.y(), u.x()}; }
  double area() const { return 4.0 * half.x() * half.y(); }
  Vec2 to_local(const Vec2& p) const { return {(p - center).dot(u), (p - center).dot(v())}; }
  Vec2 to_world(const Vec2& q) const { return center + q.x() * u + q.y() * v(); }
  bool contains(const Vec2& p, double eps = 1e-9) const;
  std::array<Vec2, 4> corners() const;
};

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c);

/// Signed shoelace area (positive for CCW).
double polygon_area(const Points2& polygon);
/// Even-odd rule; points exactly on an edge may go either way.
bool point_in_polygon(const Vec2& p, const Points2& polygon);

/// Strictly convex CCW hull (collinear points dropped), starting from the
/// lowest-x point. Throws ErrorCode::Degenerate for collinear input.
std::vector<int> convex_hull(const Points2& points);

/// Rectangle aligned with the direction `u` (unit) that tightly encloses
/// the points.
Rect2 bounding_rect(const Points2& points, const Vec2& u);

/// Minimum-area enclosing rectangle by rotating calipers over the hull edges.
/// The first axis is chosen within (-45, 45] degrees of +x.
Rect2 min_enclosing_rect(const Points2& points);

/// Raster over a rectangle (padded by the stamp radius); a cell is occupied
/// iff some stamped point lies within the stamp radius of its centre.
class Occupancy {
 public:
  Occupancy() = default;
  Occupancy(const Rect2& rect, double cell, double pad);

  const Rect2& rect() const { return rect_; }
  double cell() const { return cell_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }

  std::optional<std::array<int, 2>> cell_of(const Vec2& p) const;
  Vec2 cell_center(int ix, int iy) const;
  bool occupied(int ix, int iy) const { return occ_[std::size_t(iy) * nx_ + ix] != 0; }
  /// False outside the raster.
  bool occupied_at(const Vec2& p) const;
  std::size_t occupied_count() const;

  void stamp(const Points2& points, double radius, Exec exec = Exec::Parallel);

 private:
  Rect2 rect_;
  double cell_ = 1.0;
  Vec2 lo_ = Vec2::Zero();  ///< lower-left corner in rectangle coordinates
  int nx_ = 0;
  int ny_ = 0;
  std::vector<std::uint8_t> occ_;
};

/// Occupancy over the minimum enclosing rectangle of the points (or their
/// axis-aligned box when they are collinear or fewer than 3).
Occupancy build_occupancy(const Points2& points, double cell, double stamp_radius, Exec exec = Exec::Parallel);
Occupancy build_occupancy(const Points2& points, double cell, double stamp_radius, const Rect2& region,
                          Exec exec = Exec::Parallel);

struct Tri2Mesh {
  Points2 points;                         ///< the input points, unchanged
  std::vector<std::array<int, 3>> triangles;  ///< CCW, indices into points
  std::vector<int> representative;        ///< duplicate -> first occurrence
};

/// Bowyer-Watson insertion in input order. Points closer than 1e-9 to an
/// earlier point are merged into it. Throws ErrorCode::Degenerate when all
/// points are collinear.
Tri2Mesh delaunay(const Points2& points);

}  // namespace planekit
