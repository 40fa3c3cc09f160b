#include "helpers.hpp"
#include "planekit/spc.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace planekit;

namespace {

double shoelace(const Points2& p) {
  double a = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2& u = p[i];
    const Vec2& v = p[(i + 1) % p.size()];
    a += u.x() * v.y() - v.x() * u.y();
  }
  return 0.5 * a;
}

// Outward-facing box without its bottom, on z = 0.
TriMesh open_box(double x0, double y0, double s, double h) {
  TriMesh m;
  const double xs[4] = {x0, x0 + s, x0 + s, x0}, ys[4] = {y0, y0, y0 + s, y0 + s};
  for (double z : {0.0, h}) {
    for (int i = 0; i < 4; ++i) m.vertices.emplace_back(xs[i], ys[i], z);
  }
  for (int a = 0; a < 4; ++a) {
    const int b = (a + 1) % 4;
    m.faces.push_back({a, b, b + 4});
    m.faces.push_back({a, b + 4, a + 4});
  }
  m.faces.push_back({4, 5, 6});
  m.faces.push_back({4, 6, 7});
  return m;
}

// Floor grid with the faces under [0.8, 1.2]^2 removed, plus a box resting there.
TriMesh floor_with_box(PlaneVertexCluster& floor) {
  const TriMesh grid = testing::grid_mesh(20, 20, 2.0, 2.0);
  std::vector<int> keep;
  for (int f = 0; f < int(grid.faces.size()); ++f) {
    Vec3 c = Vec3::Zero();
    for (int v : grid.faces[f]) c += grid.vertices[v] / 3.0;
    if (!(c.x() > 0.8 && c.x() < 1.2 && c.y() > 0.8 && c.y() < 1.2)) keep.push_back(f);
  }
  TriMesh ground = compact(extract_faces(grid, keep));
  ground.plane_id.assign(ground.vertices.size(), 0);
  TriMesh box = open_box(0.8, 0.8, 0.4, 0.3);
  box.plane_id = {0, 0, 0, 0, kNoPlane, kNoPlane, kNoPlane, kNoPlane};
  floor.plane_id = 0;
  floor.vertices.resize(ground.vertices.size());
  for (int v = 0; v < int(ground.vertices.size()); ++v) floor.vertices[v] = v;
  return merge_meshes(ground, box);
}

double labelled_area(const TriMesh& m, int label) {
  double a = 0.0;
  for (int f = 0; f < int(m.faces.size()); ++f) {
    const Face& t = m.faces[f];
    if (m.label(t[0]) == label && m.label(t[1]) == label && m.label(t[2]) == label) a += face_area(m, f);
  }
  return a;
}

}  // namespace

TEST_CASE("ear clipping covers the polygon") {
  const Points2 l{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
  const auto tris = ear_clip(l);
  CHECK(tris.size() == l.size() - 2);
  double area = 0.0;
  for (const auto& t : tris) {
    const double a = 0.5 * (l[t[1]] - l[t[0]]).x() * (l[t[2]] - l[t[0]]).y() -
                     0.5 * (l[t[1]] - l[t[0]]).y() * (l[t[2]] - l[t[0]]).x();
    CHECK(a > 0.0);
    area += a;
  }
  CHECK(area == doctest::Approx(shoelace(l)));
}

TEST_CASE("loops of an annulus are one outer and one hole") {
  PlaneVertexCluster floor;
  const TriMesh m = floor_with_box(floor);
  auto loops = extract_loops(m, classify_boundary_interior(m, floor));
  REQUIRE(loops.size() == 2);
  classify_loops(loops, m, PlaneFrame{});
  std::sort(loops.begin(), loops.end(), [](const auto& a, const auto& b) { return a.kind < b.kind; });
  CHECK(loops[0].kind == LoopKind::Outer);
  CHECK(std::abs(loops[0].area) == doctest::Approx(4.0));
  CHECK(loops[1].kind == LoopKind::Hole);
  CHECK(std::abs(loops[1].area) == doctest::Approx(0.16));
}

TEST_CASE("correction fills the contact hole and the box detaches") {
  PlaneVertexCluster floor;
  const TriMesh m = floor_with_box(floor);
  const PlaneBasis basis = select_basis_max_area(project_to_plane(m.vertices, PlaneEq{Vec3::UnitZ(), 0.0}));
  RegionReport report;
  const TriMesh fixed = correct_supportive_plane(m, floor, basis, RefineParams{}, SupportExtent::OuterLoop, &report);
  CHECK_FALSE(report.skipped);
  CHECK(labelled_area(fixed, 0) == doctest::Approx(4.0).epsilon(1e-9));
  for (int v = 0; v < int(fixed.vertices.size()); ++v) {
    if (fixed.label(v) == 0) CHECK(std::abs(fixed.vertices[v].z()) <= 1e-9);
  }

  const DetachResult d = detach_object(fixed, {0});
  REQUIRE(d.objects.size() == 1);
  CHECK(d.scene.faces.size() + d.objects[0].faces.size() == fixed.faces.size());
  CHECK(d.objects[0].faces.size() == 10);

  SealReport seal;
  const TriMesh closed = seal_contact(d.objects[0], PlaneEq{Vec3::UnitZ(), 0.0}, 0.005, &seal);
  CHECK(seal.loops_sealed == 1);
  CHECK(open_edges(closed.faces).empty());
  for (std::size_t f = d.objects[0].faces.size(); f < closed.faces.size(); ++f) {
    CHECK(face_normal(closed, int(f)).normalized().z() == doctest::Approx(-1.0));
  }
}

TEST_CASE("loops far from the plane are not sealed") {
  SealReport seal;
  const TriMesh box = open_box(0, 0, 1, 1);
  const TriMesh out = seal_contact(box, PlaneEq{Vec3::UnitZ(), -0.5}, 0.005, &seal);
  CHECK(seal.loops_skipped == 1);
  CHECK(out.faces.size() == box.faces.size());
}

TEST_CASE("a cluster without loops is rejected") {
  const TriMesh m = testing::grid_mesh(2, 2, 1, 1);
  PlaneVertexCluster c;
  c.vertices = {0};
  CHECK_THROWS_WITH_AS(correct_supportive_plane(m, c, PlaneBasis{}, RefineParams{}),
                       doctest::Contains("not a supportive plane candidate"), Error);
}
