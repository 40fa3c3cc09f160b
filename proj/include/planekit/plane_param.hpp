#pragma once

// Plane fitting and the three-point barycentric plane representation.

#include "planekit/common.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace planekit {

/// Plane {p : n.p + d = 0} with |n| = 1.
struct PlaneEq {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;

  double signed_distance(const Vec3& p) const { return normal.dot(p) + offset; }
  Vec3 project(const Vec3& p) const { return p - signed_distance(p) * normal; }

  /// Flips the sign so that n_z > 0, or n_y > 0 when n_z == 0, then n_x.
  void canonicalize();
  static PlaneEq through(const Vec3& point, const Vec3& normal);
};

/// Three non-collinear points spanning a plane.
struct PlaneBasis {
  Vec3 f1 = Vec3::Zero();
  Vec3 f2 = Vec3::Zero();
  Vec3 f3 = Vec3::Zero();

  Vec3 e1() const { return f1 - f3; }
  Vec3 e2() const { return f2 - f3; }
  double area() const { return 0.5 * e1().cross(e2()).norm(); }
  double max_side() const;
  /// area > 1e-8 * max_side^2
  bool non_collinear() const;
  /// Plane through the three points (canonical sign).
  PlaneEq plane() const;
};

/// Affine weights (w1, w2); w3 is always 1 - w1 - w2.
struct BarycentricPoint {
  double w1 = 0.0;
  double w2 = 0.0;

  double w3() const { return 1.0 - w1 - w2; }
};

struct RansacResult {
  PlaneEq plane;
  std::vector<int> inliers;
};

struct RansacParams {
  double inlier_dist = 3.0 * kDefaultDelta;
  int iterations = 512;
};

/// Best-of-N three-point hypotheses, least-squares refit on the inliers.
/// Throws ErrorCode::Degenerate when the points are collinear.
RansacResult ransac_plane(std::span<const Vec3> points, const RansacParams& params, std::uint64_t seed);

/// Least-squares plane through points (smallest covariance eigenvector).
PlaneEq fit_plane(std::span<const Vec3> points);

Points3 project_to_plane(std::span<const Vec3> points, const PlaneEq& plane);

/// Random non-collinear triple (up to 64 draws), then max-area fallback.
PlaneBasis select_basis(std::span<const Vec3> projected, std::uint64_t seed);
/// Farthest pair plus the point farthest from their line.
PlaneBasis select_basis_max_area(std::span<const Vec3> projected);

/// Caller is expected to pass a point on the basis plane.
BarycentricPoint to_barycentric(const Vec3& point, const PlaneBasis& basis);
Vec3 from_barycentric(const BarycentricPoint& bp, const PlaneBasis& basis);

/// Largest distance between any two of the points (via the planar hull
/// when the points are coplanar, brute force otherwise for small sets).
double point_set_diameter(std::span<const Vec3> points);

}  // namespace planekit
