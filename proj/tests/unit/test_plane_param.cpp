#include "helpers.hpp"
#include "planekit/plane_param.hpp"

#include <doctest.h>

#include <cmath>

using namespace planekit;

namespace {

PlaneBasis random_basis(Rng& rng) {
  PlaneBasis b;
  do {
    for (Vec3* f : {&b.f1, &b.f2, &b.f3}) *f = Vec3(uniform01(rng), uniform01(rng), uniform01(rng)) * 2.0 - Vec3::Ones();
  } while (!b.non_collinear());
  return b;
}

}  // namespace

TEST_CASE("barycentric points stay on the basis plane") {
  Rng rng(1);
  for (int i = 0; i < 2000; ++i) {
    const PlaneBasis b = random_basis(rng);
    const BarycentricPoint w{4.0 * uniform01(rng) - 2.0, 4.0 * uniform01(rng) - 2.0};
    const Vec3 p = from_barycentric(w, b);
    // plane through f1 with normal e1 x e2, written independently
    const Vec3 n = (b.f1 - b.f3).cross(b.f2 - b.f3).normalized();
    CHECK(std::abs(n.dot(p - b.f1)) <= 1e-9);
    CHECK(std::abs(b.plane().signed_distance(p)) <= 1e-9);
    const BarycentricPoint back = to_barycentric(p, b);
    CHECK(std::abs(back.w1 - w.w1) <= 1e-9);
    CHECK(std::abs(back.w2 - w.w2) <= 1e-9);
  }
}

TEST_CASE("basis points reproduce themselves") {
  const PlaneBasis b{{1, 0, 0}, {0, 1, 0}, {0, 0, 0}};
  CHECK((from_barycentric({1, 0}, b) - b.f1).norm() == 0.0);
  CHECK((from_barycentric({0, 1}, b) - b.f2).norm() == 0.0);
  CHECK((from_barycentric({0, 0}, b) - b.f3).norm() == 0.0);
  CHECK(b.area() == doctest::Approx(0.5));
  CHECK_FALSE(PlaneBasis{{0, 0, 0}, {1, 1, 1}, {2, 2, 2}}.non_collinear());
}

TEST_CASE("least-squares plane of exact samples") {
  Rng rng(2);
  const Vec3 n = Vec3(1, 2, 3).normalized();
  const PlaneEq truth = PlaneEq::through({0.3, -0.2, 0.5}, n);
  Points3 pts;
  const Vec3 u = n.unitOrthogonal(), v = n.cross(u);
  for (int i = 0; i < 200; ++i) pts.push_back(truth.project(Vec3::Zero()) + uniform01(rng) * u + uniform01(rng) * v);
  PlaneEq fit = fit_plane(pts);
  CHECK(std::abs(std::abs(fit.normal.dot(n)) - 1.0) < 1e-12);
  for (const Vec3& p : pts) CHECK(std::abs(fit.signed_distance(p)) < 1e-12);
  fit.canonicalize();
  CHECK(fit.normal.z() > 0.0);
}

TEST_CASE("ransac separates inliers from outliers") {
  Rng rng(3);
  Points3 pts;
  for (int i = 0; i < 300; ++i) pts.emplace_back(uniform01(rng), uniform01(rng), 0.001 * (uniform01(rng) - 0.5));
  for (int i = 0; i < 60; ++i) pts.emplace_back(uniform01(rng), uniform01(rng), 0.2 + uniform01(rng));
  const RansacResult r = ransac_plane(pts, RansacParams{}, 7);
  CHECK(r.inliers.size() == 300);
  CHECK(r.inliers.back() == 299);
  CHECK(std::abs(r.plane.normal.z()) > 0.999);
  const RansacResult again = ransac_plane(pts, RansacParams{}, 7);
  CHECK(again.inliers == r.inliers);
  CHECK_THROWS_AS(ransac_plane(Points3{{0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {3, 3, 3}}, RansacParams{}, 1), Error);
}

TEST_CASE("basis selection on projected points") {
  Points3 pts;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) pts.emplace_back(i, j, 1.0);
  }
  const PlaneBasis b = select_basis(pts, 4);
  CHECK(b.non_collinear());
  CHECK(std::abs(b.plane().normal.z()) == doctest::Approx(1.0));
  const PlaneBasis m = select_basis_max_area(pts);
  CHECK(m.area() == doctest::Approx(0.5 * 81.0));
  CHECK(point_set_diameter(pts) == doctest::Approx(std::sqrt(2.0) * 9.0));
}
