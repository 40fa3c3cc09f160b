// Serial vs parallel timings of the OpenMP kernels. Each benchmark takes
// the execution mode as its argument: 0 = serial reference, 1 = parallel.

#include "planekit/camera.hpp"
#include "planekit/eval.hpp"
#include "planekit/geom2d.hpp"
#include "planekit/lifting.hpp"
#include "planekit/mesh_refine.hpp"
#include "planekit/random.hpp"
#include "planekit/reparam_opt.hpp"
#include "planekit/spatial.hpp"
#include "planekit/synth.hpp"

#include <benchmark/benchmark.h>

using namespace planekit;

namespace {

Exec mode(const benchmark::State& state) { return state.range(0) ? Exec::Parallel : Exec::Serial; }

Points3 cloud(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Points3 p;
  for (std::size_t i = 0; i < n; ++i) p.emplace_back(uniform01(rng), uniform01(rng), uniform01(rng));
  return p;
}

const SynthScene& room() {
  static const SynthScene s = build_scene(SceneSpec::empty_room());
  return s;
}

const TriMesh& dense_room() {
  static const TriMesh m = perturb_dense_mesh(room().rects, 0.02, 0.002, 7);
  return m;
}

void BM_NearestDistances(benchmark::State& state) {
  const Points3 ref = cloud(200000, 1), q = cloud(200000, 2);
  const PointGrid grid(ref, 0.02);
  for (auto _ : state) benchmark::DoNotOptimize(nearest_distances(grid, q, mode(state)));
}

void BM_SurfaceDistances(benchmark::State& state) {
  const TriangleGrid grid(dense_room());
  const Points3 q = sample_mesh(room().gt_mesh, 50000, 3).points;
  for (auto _ : state) benchmark::DoNotOptimize(surface_distances(grid, q, mode(state)));
}

void BM_AssignVertices(benchmark::State& state) {
  const LabeledCloud c = sample_surface_stratified(room(), 0.01, 3);
  const auto sets = plane_point_sets(c.points, c.labels, int(room().planes.size()));
  for (auto _ : state) benchmark::DoNotOptimize(assign_vertices(dense_room(), sets, 0.005, mode(state)));
}

void BM_OccupancyStamp(benchmark::State& state) {
  Rng rng(4);
  Points2 pts;
  for (int i = 0; i < 200000; ++i) pts.emplace_back(4 * uniform01(rng), 3 * uniform01(rng));
  for (auto _ : state) benchmark::DoNotOptimize(build_occupancy(pts, 0.01, 0.02, mode(state)));
}

void BM_OptimizeStep(benchmark::State& state) {
  const PlaneBasis b{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  std::vector<PlaneBasis> bases(8, b);
  std::vector<ParamPoint> pts;
  std::vector<Vec3> grads;
  Rng rng(5);
  for (int i = 0; i < 400000; ++i) {
    pts.push_back(PlanarParam{i % 8, {uniform01(rng), uniform01(rng)}});
    grads.emplace_back(1e-9 * uniform01(rng), 1e-9 * uniform01(rng), 1e-9 * uniform01(rng));
  }
  for (auto _ : state) optimize_step(pts, bases, grads, 1e-3, 1e-5, mode(state));
}

void BM_ProjectPoints(benchmark::State& state) {
  const Points3 p = cloud(500000, 6);
  const Camera& cam = room().cameras[0];
  for (auto _ : state) benchmark::DoNotOptimize(project_points(p, cam, mode(state)));
}

void BM_SceneMetrics(benchmark::State& state) {
  const Points3 a = sample_mesh(dense_room(), 100000, 7).points, b = sample_mesh(room().gt_mesh, 100000, 8).points;
  for (auto _ : state) benchmark::DoNotOptimize(scene_metrics(a, b, 0.05, mode(state)));
}

}  // namespace

BENCHMARK(BM_NearestDistances)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SurfaceDistances)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssignVertices)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OccupancyStamp)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OptimizeStep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProjectPoints)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SceneMetrics)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
