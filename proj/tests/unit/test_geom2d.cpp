#include "planekit/geom2d.hpp"
#include "planekit/random.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace planekit;

namespace {

Points2 random_points2(int n, std::uint64_t seed) {
  Rng rng(seed);
  Points2 p;
  for (int i = 0; i < n; ++i) p.emplace_back(uniform01(rng), uniform01(rng));
  return p;
}

// p is an extreme point unless it lies in a triangle of three other points.
std::set<int> extreme_points_bruteforce(const Points2& p) {
  const int n = int(p.size());
  std::set<int> out;
  for (int i = 0; i < n; ++i) {
    bool inside = false;
    for (int a = 0; a < n && !inside; ++a) {
      for (int b = a + 1; b < n && !inside; ++b) {
        for (int c = b + 1; c < n && !inside; ++c) {
          if (a == i || b == i || c == i) continue;
          const double o1 = orient2d(p[a], p[b], p[i]), o2 = orient2d(p[b], p[c], p[i]), o3 = orient2d(p[c], p[a], p[i]);
          inside = (o1 >= 0 && o2 >= 0 && o3 >= 0) || (o1 <= 0 && o2 <= 0 && o3 <= 0);
        }
      }
    }
    if (!inside) out.insert(i);
  }
  return out;
}

double circumcircle_violation(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  // > 0 when d lies strictly inside the circumcircle of CCW abc (scaled incircle determinant)
  const double adx = a.x() - d.x(), ady = a.y() - d.y();
  const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  const double cdx = c.x() - d.x(), cdy = c.y() - d.y();
  return (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy) + (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy) +
         (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
}

}  // namespace

TEST_CASE("polygon area and containment") {
  const Points2 square{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  CHECK(polygon_area(square) == doctest::Approx(4.0));
  Points2 cw(square.rbegin(), square.rend());
  CHECK(polygon_area(cw) == doctest::Approx(-4.0));
  CHECK(point_in_polygon({1, 1}, square));
  CHECK_FALSE(point_in_polygon({3, 1}, square));
  const Points2 l_shape{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
  CHECK(polygon_area(l_shape) == doctest::Approx(3.0));
  CHECK_FALSE(point_in_polygon({1.5, 1.5}, l_shape));
  CHECK(point_in_polygon({0.5, 1.5}, l_shape));
}

TEST_CASE("convex hull matches the extreme-point oracle") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Points2 p = random_points2(50, s);
    const auto hull = convex_hull(p);
    CHECK(std::set<int>(hull.begin(), hull.end()) == extreme_points_bruteforce(p));
    Points2 poly;
    for (int i : hull) poly.push_back(p[i]);
    CHECK(polygon_area(poly) > 0.0);
  }
}

TEST_CASE("convex hull drops collinear points and rejects a line") {
  const Points2 p{{0, 0}, {1, 0}, {2, 0}, {2, 2}, {0, 2}, {1, 1}};
  const auto hull = convex_hull(p);
  CHECK(hull.size() == 4);
  const Points2 line{{0, 0}, {1, 1}, {2, 2}};
  CHECK_THROWS_AS(convex_hull(line), Error);
}

TEST_CASE("minimum enclosing rectangle") {
  SUBCASE("rotated rectangle is recovered") {
    const double a = 0.3;
    const Vec2 u(std::cos(a), std::sin(a)), v(-std::sin(a), std::cos(a));
    Points2 p;
    for (double s : {-2.0, 2.0}) {
      for (double t : {-0.5, 0.5}) p.push_back(s * u + t * v);
    }
    p.push_back(Vec2::Zero());
    const Rect2 r = min_enclosing_rect(p);
    CHECK(r.area() == doctest::Approx(4.0).epsilon(1e-12));
    for (const Vec2& q : p) CHECK(r.contains(q, 1e-9));
  }
  SUBCASE("never worse than an angle sweep") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const Points2 p = random_points2(40, 100 + s);
      const Rect2 r = min_enclosing_rect(p);
      double best = INFINITY;
      for (int k = 0; k < 900; ++k) {
        const double a = k * M_PI / 1800.0;
        best = std::min(best, bounding_rect(p, Vec2(std::cos(a), std::sin(a))).area());
      }
      CHECK(r.area() <= best * (1.0 + 1e-6));
      for (const Vec2& q : p) CHECK(r.contains(q, 1e-9));
    }
  }
}

TEST_CASE("occupancy marks cells near points only") {
  const Points2 p{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const Occupancy occ = build_occupancy(p, 0.1, 0.1);
  CHECK(occ.occupied_at({0, 0}));
  CHECK_FALSE(occ.occupied_at({0.5, 0.5}));
  CHECK_FALSE(occ.occupied_at({5, 5}));
  const Occupancy serial = build_occupancy(p, 0.1, 0.1, Exec::Serial);
  CHECK(serial.occupied_count() == occ.occupied_count());
}

TEST_CASE("delaunay satisfies the empty circle property") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Points2 p = random_points2(300, 200 + s);
    const Tri2Mesh t = delaunay(p);
    const auto hull = convex_hull(p);
    CHECK(t.triangles.size() == 2 * p.size() - 2 - hull.size());
    for (const auto& tri : t.triangles) {
      CHECK(orient2d(p[tri[0]], p[tri[1]], p[tri[2]]) > 0.0);
      for (int k = 0; k < int(p.size()); ++k) {
        if (k == tri[0] || k == tri[1] || k == tri[2]) continue;
        REQUIRE(circumcircle_violation(p[tri[0]], p[tri[1]], p[tri[2]], p[k]) <= 1e-9);
      }
    }
  }
}

TEST_CASE("delaunay on a regular grid covers the square without gaps") {
  Points2 p;
  for (int j = 0; j <= 20; ++j) {
    for (int i = 0; i <= 20; ++i) p.emplace_back(0.05 * i, 0.05 * j);
  }
  const Tri2Mesh t = delaunay(p);
  double area = 0.0;
  for (const auto& tri : t.triangles) area += 0.5 * orient2d(p[tri[0]], p[tri[1]], p[tri[2]]);
  CHECK(area == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.triangles.size() == 2 * 20 * 20);
}

TEST_CASE("delaunay merges duplicates and rejects collinear input") {
  const Points2 p{{0, 0}, {1, 0}, {0, 1}, {0, 0}};
  const Tri2Mesh t = delaunay(p);
  CHECK(t.representative[3] == 0);
  CHECK(t.triangles.size() == 1);
  CHECK_THROWS_AS(delaunay(Points2{{0, 0}, {1, 1}, {2, 2}}), Error);
}
