#include "planekit/camera.hpp"

#include <Eigen/Geometry>

#include <cmath>

namespace planekit {

Mat3 Camera::intrinsics() const {
  Mat3 k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

Vec3 Camera::back_project(double u, double v, double depth) const {
  const Vec3 p_cam((u - cx) / fx * depth, (v - cy) / fy * depth, depth);
  return rotation.transpose() * (p_cam - translation);
}

Vec3 Camera::ray_direction(double u, double v) const {
  const Vec3 d_cam((u - cx) / fx, (v - cy) / fy, 1.0);
  return (rotation.transpose() * d_cam).normalized();
}

void Camera::validate() const {
  if (!(fx > 0.0 && fy > 0.0)) throw Error(ErrorCode::InvalidArgument, "camera focal lengths must be positive");
  if (width <= 0 || height <= 0) throw Error(ErrorCode::InvalidArgument, "camera image size must be positive");
  const double err = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (err > 1e-6) throw Error(ErrorCode::InvalidArgument, "camera rotation is not orthonormal");
}

Camera Camera::look_at(const Vec3& eye, const Vec3& target, const Vec3& up, double fx, double fy, int width,
                       int height) {
  const Vec3 z = (target - eye).normalized();
  Vec3 x = z.cross(up);
  if (x.norm() < 1e-12) x = z.unitOrthogonal();
  x.normalize();
  const Vec3 y = z.cross(x);
  Camera cam;
  cam.rotation.row(0) = x.transpose();
  cam.rotation.row(1) = y.transpose();
  cam.rotation.row(2) = z.transpose();
  cam.translation = -cam.rotation * eye;
  cam.fx = fx;
  cam.fy = fy;
  cam.cx = 0.5 * (width - 1);
  cam.cy = 0.5 * (height - 1);
  cam.width = width;
  cam.height = height;
  return cam;
}

int Projection::pixel_index(int width) const {
  return int(std::lround(pixel.y())) * width + int(std::lround(pixel.x()));
}

Projection project_point(const Vec3& p, const Camera& camera) {
  const Vec3 pc = camera.to_camera(p);
  Projection out;
  out.depth = pc.z();
  if (!(pc.z() > 0.0)) return out;
  out.pixel = Vec2(camera.fx * pc.x() / pc.z() + camera.cx, camera.fy * pc.y() / pc.z() + camera.cy);
  const double u = std::round(out.pixel.x());
  const double v = std::round(out.pixel.y());
  out.in_frustum = u >= 0.0 && v >= 0.0 && u <= camera.width - 1 && v <= camera.height - 1;
  return out;
}

}  // namespace planekit
