#include "helpers.hpp"
#include "planekit/camera.hpp"
#include "planekit/lifting.hpp"
#include "planekit/synth.hpp"

#include <doctest.h>

#include <map>

using namespace planekit;

TEST_CASE("projection and back-projection round trip") {
  const Camera cam = Camera::look_at({0, -3, 1}, {0, 0, 1}, Vec3::UnitZ(), 200, 200, 160, 120);
  CHECK_NOTHROW(cam.validate());
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const double u = 160 * uniform01(rng), v = 120 * uniform01(rng), d = 0.5 + 3 * uniform01(rng);
    const Vec3 p = cam.back_project(u, v, d);
    const Projection pr = project_point(p, cam);
    CHECK(std::abs(pr.pixel.x() - u) < 1e-9);
    CHECK(std::abs(pr.pixel.y() - v) < 1e-9);
    CHECK(pr.depth == doctest::Approx(d));
    CHECK((cam.ray_direction(u, v) - (p - cam.center()).normalized()).norm() < 1e-12);
  }
  CHECK_FALSE(project_point({0, -4, 1}, cam).in_frustum);
  Camera bad = cam;
  bad.rotation(0, 0) = 2.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("batch projection equals per-point projection") {
  const Camera cam = Camera::look_at({0, -3, 1}, {0, 0, 1}, Vec3::UnitZ(), 200, 200, 160, 120);
  const Points3 pts = testing::random_points(500, 2, 2.0);
  const auto a = project_points(pts, cam, Exec::Parallel);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Projection b = project_point(pts[i], cam);
    CHECK(a[i].pixel == b.pixel);
    CHECK(a[i].in_frustum == b.in_frustum);
  }
}

TEST_CASE("occlusion filter keeps the nearer depth group") {
  const std::vector<double> split{1.0, 1.01, 3.0, 0.99, 3.1, 1.02};
  CHECK(occlusion_filter(split, 1) == std::vector<int>{0, 1, 3, 5});
  const std::vector<double> close{1.0, 1.01, 1.02, 1.03};
  CHECK(occlusion_filter(close, 1) == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("co-planarity graph counts unordered pairs") {
  CoplanarityGraph g(4);
  g.increment(2, 1);
  g.increment(1, 2, 2);
  g.increment(0, 3);
  CHECK(g.weight(1, 2) == 3);
  CHECK(g.weight(2, 1) == 3);
  CHECK(g.weight(0, 1) == 0);
  const auto e = g.sorted_edges();
  REQUIRE(e.size() == 2);
  CHECK(e[0].u == 0);
  CHECK(e[1].weight == 3.0);
}

TEST_CASE("lifting ground-truth masks clusters the room by plane") {
  SceneSpec spec = SceneSpec::empty_room();
  spec.views = 8;
  spec.width = 160;
  spec.height = 120;
  spec.focal = 128;
  const SynthScene scene = build_scene(spec);
  std::vector<CameraView> views;
  for (std::size_t i = 0; i < scene.cameras.size(); ++i) {
    const RenderedView r = render_view(scene, scene.cameras[i], {}, i);
    views.push_back({scene.cameras[i], r.depth, r.instances});
  }
  const LabeledCloud cloud = sample_surface(scene, 2000, 3);
  LiftingParams lp;
  lp.max_instance_points = 200;
  const PlanePartition part = lift_scene(cloud.points, views, lp, 0);
  std::size_t agree = 0, total = 0;
  for (const auto& c : part.clusters) {
    std::map<int, std::size_t> votes;
    for (int i : c) ++votes[cloud.labels[i]];
    std::size_t best = 0;
    for (const auto& [l, n] : votes) best = std::max(best, n);
    agree += best;
    total += c.size();
  }
  REQUIRE(total > 0);
  CHECK(double(agree) / double(total) >= 0.9);
  const PlanePartition again = lift_scene(cloud.points, views, lp, 0, Exec::Serial);
  CHECK(again.cluster_of == part.cluster_of);
}
