#pragma once

#include "planekit/common.hpp"

#include <Eigen/Core>

namespace planekit {

/// Pinhole camera, OpenCV convention (x right, y down, z forward). Pixel
/// (i, j) has its center at image coordinates (i, j).
struct Camera {
  double fx = 1.0, fy = 1.0, cx = 0.0, cy = 0.0;
  Mat3 rotation = Mat3::Identity();     ///< world -> camera
  Vec3 translation = Vec3::Zero();      ///< p_cam = R p + t
  int width = 0;
  int height = 0;

  Mat3 intrinsics() const;
  Vec3 center() const { return -rotation.transpose() * translation; }
  Vec3 to_camera(const Vec3& p) const { return rotation * p + translation; }

  /// World point seen at pixel (u, v) with z-depth `depth`.
  Vec3 back_project(double u, double v, double depth) const;
  /// Unit world-frame direction of the ray through pixel (u, v).
  Vec3 ray_direction(double u, double v) const;

  /// Throws unless R is orthonormal within 1e-6 and focal lengths are positive.
  void validate() const;

  static Camera look_at(const Vec3& eye, const Vec3& target, const Vec3& up, double fx, double fy,
                        int width, int height);
};

struct Projection {
  Vec2 pixel = Vec2::Zero();
  double depth = 0.0;
  bool in_frustum = false;

  /// Linear index of the nearest pixel; only meaningful when in_frustum.
  int pixel_index(int width) const;
};

Projection project_point(const Vec3& p, const Camera& camera);

}  // namespace planekit
