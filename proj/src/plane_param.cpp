#include "planekit/plane_param.hpp"

#include "planekit/geom2d.hpp"
#include "planekit/random.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

namespace planekit {

void PlaneEq::canonicalize() {
  const double eps = 1e-12;
  bool flip = false;
  if (std::abs(normal.z()) > eps) {
    flip = normal.z() < 0.0;
  } else if (std::abs(normal.y()) > eps) {
    flip = normal.y() < 0.0;
  } else {
    flip = normal.x() < 0.0;
  }
  if (flip) {
    normal = -normal;
    offset = -offset;
  }
}

PlaneEq PlaneEq::through(const Vec3& point, const Vec3& normal) {
  PlaneEq eq;
  eq.normal = normal.normalized();
  eq.offset = -eq.normal.dot(point);
  return eq;
}

double PlaneBasis::max_side() const {
  return std::max({(f1 - f2).norm(), (f2 - f3).norm(), (f3 - f1).norm()});
}

bool PlaneBasis::non_collinear() const {
  const double s = max_side();
  return s > 0.0 && area() > 1e-8 * s * s;
}

PlaneEq PlaneBasis::plane() const {
  PlaneEq eq = PlaneEq::through(f3, e1().cross(e2()));
  eq.canonicalize();
  return eq;
}

namespace {

struct Moments {
  Vec3 centroid;
  Eigen::SelfAdjointEigenSolver<Mat3> eig;
};

template <class Range>
Moments moments(const Range& points, std::size_t n) {
  Vec3 c = Vec3::Zero();
  for (const Vec3& p : points) c += p;
  c /= double(n);
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : points) {
    const Vec3 d = p - c;
    cov += d * d.transpose();
  }
  return {c, Eigen::SelfAdjointEigenSolver<Mat3>(cov)};
}

bool collinear_spread(const Eigen::SelfAdjointEigenSolver<Mat3>& eig) {
  const Vec3 ev = eig.eigenvalues();  // ascending
  return !(ev(2) > 0.0) || ev(1) <= 1e-12 * ev(2);
}

}  // namespace

PlaneEq fit_plane(std::span<const Vec3> points) {
  if (points.size() < 3) throw Error(ErrorCode::Degenerate, "degenerate cluster: fewer than 3 points");
  const Moments m = moments(points, points.size());
  if (collinear_spread(m.eig)) throw Error(ErrorCode::Degenerate, "degenerate cluster");
  PlaneEq eq = PlaneEq::through(m.centroid, m.eig.eigenvectors().col(0));
  eq.canonicalize();
  return eq;
}

RansacResult ransac_plane(std::span<const Vec3> points, const RansacParams& params, std::uint64_t seed) {
  if (!(params.inlier_dist > 0.0)) throw Error(ErrorCode::InvalidArgument, "inlier_dist must be positive");
  if (points.size() < 3) throw Error(ErrorCode::Degenerate, "degenerate cluster: fewer than 3 points");
  const Moments m = moments(points, points.size());
  if (collinear_spread(m.eig)) throw Error(ErrorCode::Degenerate, "degenerate cluster");
  const double scale2 = m.eig.eigenvalues()(2) / double(points.size());

  Rng rng(seed);
  const std::size_t n = points.size();
  std::size_t best_count = 0;
  double best_mean = 0.0;
  PlaneEq best;
  bool found = false;
  const int iters = std::max(1, params.iterations);
  for (int it = 0; it < iters; ++it) {
    std::size_t a = uniform_index(rng, n), b = uniform_index(rng, n), c = uniform_index(rng, n);
    if (n == 3) {
      a = 0;
      b = 1;
      c = 2;
    }
    if (a == b || b == c || a == c) continue;
    const Vec3 normal = (points[b] - points[a]).cross(points[c] - points[a]);
    if (!(normal.squaredNorm() > 1e-20 * scale2 * scale2)) continue;
    const PlaneEq h = PlaneEq::through(points[a], normal);
    std::size_t count = 0;
    double sum = 0.0;
    for (const Vec3& p : points) {
      const double d = std::abs(h.signed_distance(p));
      if (d <= params.inlier_dist) {
        ++count;
        sum += d;
      }
    }
    const double mean = count ? sum / double(count) : 0.0;
    if (!found || count > best_count || (count == best_count && mean < best_mean)) {
      found = true;
      best = h;
      best_count = count;
      best_mean = mean;
    }
  }
  if (!found) best = PlaneEq::through(m.centroid, m.eig.eigenvectors().col(0));

  auto collect = [&](const PlaneEq& plane) {
    std::vector<int> inl;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(plane.signed_distance(points[i])) <= params.inlier_dist) inl.push_back(int(i));
    }
    return inl;
  };

  RansacResult out;
  out.inliers = collect(best);
  out.plane = best;
  if (out.inliers.size() >= 3) {
    Points3 inlier_points;
    inlier_points.reserve(out.inliers.size());
    for (int i : out.inliers) inlier_points.push_back(points[i]);
    try {
      const PlaneEq refit = fit_plane(inlier_points);
      std::vector<int> refit_inliers = collect(refit);
      if (refit_inliers.size() >= 3) {
        out.plane = refit;
        out.inliers = std::move(refit_inliers);
      }
    } catch (const Error&) {
      // collinear inlier set: keep the hypothesis plane
    }
  }
  out.plane.canonicalize();
  return out;
}

Points3 project_to_plane(std::span<const Vec3> points, const PlaneEq& plane) {
  Points3 out;
  out.reserve(points.size());
  for (const Vec3& p : points) out.push_back(plane.project(p));
  return out;
}

namespace {

// Hull vertices of the points in their principal plane; falls back to the
// two extremes along the principal axis when the points are collinear.
std::vector<int> extreme_candidates(std::span<const Vec3> points) {
  const Moments m = moments(points, points.size());
  const Vec3 a0 = m.eig.eigenvectors().col(2);
  const Vec3 a1 = m.eig.eigenvectors().col(1);
  Points2 flat;
  flat.reserve(points.size());
  for (const Vec3& p : points) flat.emplace_back((p - m.centroid).dot(a0), (p - m.centroid).dot(a1));
  try {
    return convex_hull(flat);
  } catch (const Error&) {
    int lo = 0, hi = 0;
    for (int i = 1; i < int(flat.size()); ++i) {
      if (flat[i].x() < flat[lo].x()) lo = i;
      if (flat[i].x() > flat[hi].x()) hi = i;
    }
    return {lo, hi};
  }
}

std::pair<int, int> farthest_pair(std::span<const Vec3> points, const std::vector<int>& candidates) {
  std::pair<int, int> best{candidates.front(), candidates.front()};
  double best_d = -1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (std::size_t j = i + 1; j < candidates.size(); ++j) {
      const double d = (points[candidates[i]] - points[candidates[j]]).squaredNorm();
      if (d > best_d) {
        best_d = d;
        best = {candidates[i], candidates[j]};
      }
    }
  }
  return best;
}

}  // namespace

double point_set_diameter(std::span<const Vec3> points) {
  if (points.size() < 2) return 0.0;
  if (points.size() <= 64) {
    double best = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      for (std::size_t j = i + 1; j < points.size(); ++j) best = std::max(best, (points[i] - points[j]).norm());
    }
    return best;
  }
  const auto [a, b] = farthest_pair(points, extreme_candidates(points));
  return (points[a] - points[b]).norm();
}

PlaneBasis select_basis_max_area(std::span<const Vec3> projected) {
  if (projected.size() < 3) throw Error(ErrorCode::Degenerate, "select_basis: fewer than 3 points");
  std::vector<int> candidates;
  if (projected.size() <= 64) {
    candidates.resize(projected.size());
    for (std::size_t i = 0; i < projected.size(); ++i) candidates[i] = int(i);
  } else {
    candidates = extreme_candidates(projected);
  }
  const auto [a, b] = farthest_pair(projected, candidates);
  const Vec3 dir = projected[b] - projected[a];
  int c = a;
  double best = -1.0;
  for (std::size_t i = 0; i < projected.size(); ++i) {
    const double d = dir.cross(projected[i] - projected[a]).squaredNorm();
    if (d > best) {
      best = d;
      c = int(i);
    }
  }
  PlaneBasis basis{projected[a], projected[b], projected[c]};
  const double diam = dir.norm();
  if (!(basis.area() > 1e-8 * diam * diam)) throw Error(ErrorCode::Degenerate, "select_basis: points are collinear");
  return basis;
}

PlaneBasis select_basis(std::span<const Vec3> projected, std::uint64_t seed) {
  const std::size_t n = projected.size();
  if (n < 3) throw Error(ErrorCode::Degenerate, "select_basis: fewer than 3 points");
  if (n == 3) {
    PlaneBasis basis{projected[0], projected[1], projected[2]};
    if (!basis.non_collinear()) throw Error(ErrorCode::Degenerate, "select_basis: points are collinear");
    return basis;
  }
  const double diam = point_set_diameter(projected);
  const double min_area = 1e-8 * diam * diam;
  Rng rng(seed);
  for (int draw = 0; draw < 64; ++draw) {
    const std::size_t a = uniform_index(rng, n), b = uniform_index(rng, n), c = uniform_index(rng, n);
    if (a == b || b == c || a == c) continue;
    PlaneBasis basis{projected[a], projected[b], projected[c]};
    if (basis.area() > min_area && basis.non_collinear()) return basis;
  }
  return select_basis_max_area(projected);
}

BarycentricPoint to_barycentric(const Vec3& point, const PlaneBasis& basis) {
  if (!basis.non_collinear()) throw Error(ErrorCode::Degenerate, "to_barycentric: collinear basis");
  const Vec3 e1 = basis.e1();
  const Vec3 e2 = basis.e2();
  const Vec3 n = e1.cross(e2);
  const double nn = n.squaredNorm();
  const Vec3 r = point - basis.f3;
  return {r.cross(e2).dot(n) / nn, e1.cross(r).dot(n) / nn};
}

Vec3 from_barycentric(const BarycentricPoint& bp, const PlaneBasis& basis) {
  return basis.f3 + bp.w1 * basis.e1() + bp.w2 * basis.e2();
}

}  // namespace planekit
