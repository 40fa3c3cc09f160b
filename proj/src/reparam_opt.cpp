#include "planekit/reparam_opt.hpp"

#include "planekit/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace planekit {

Vec3 reconstruct(const ParamPoint& p, std::span<const PlaneBasis> bases) {
  if (const auto* free = std::get_if<FreeParam>(&p)) return free->xyz;
  const auto& planar = std::get<PlanarParam>(p);
  if (planar.plane_id < 0 || std::size_t(planar.plane_id) >= bases.size()) {
    throw Error(ErrorCode::InvalidArgument, "planar point references a missing plane");
  }
  return from_barycentric(planar.bary, bases[planar.plane_id]);
}

void DgrSchedule::validate() const {
  if (densify_interval <= 0 || window_tail < 0 || window_tail > densify_interval) {
    throw Error(ErrorCode::InvalidArgument, "schedule requires 0 <= window_tail <= densify_interval");
  }
  if (densify_start < 0 || densify_start >= densify_end) {
    throw Error(ErrorCode::InvalidArgument, "schedule requires 0 <= densify_start < densify_end");
  }
  if (final_window < 0) throw Error(ErrorCode::InvalidArgument, "final_window must be non-negative");
}

bool dgr_active(long iter, const DgrSchedule& s) {
  if (iter < 0) return false;
  if (iter >= s.densify_start && iter < s.densify_end && iter % s.densify_interval >= s.densify_interval - s.window_tail) {
    return true;
  }
  return iter >= s.final_iter && iter < long(s.final_iter) + s.final_window;
}

bool dgr_window_end(long iter, const DgrSchedule& sched) {
  return dgr_active(iter, sched) && !dgr_active(iter + 1, sched);
}

long dgr_active_count(long begin, long end, const DgrSchedule& sched) {
  long n = 0;
  for (long i = begin; i < end; ++i) n += dgr_active(i, sched) ? 1 : 0;
  return n;
}

void DgrParams::validate() const {
  auto ok = [](double f) { return f > 0.0 && f <= 1.0; };
  if (!ok(planar_fraction) || !ok(nonplanar_fraction)) {
    throw Error(ErrorCode::InvalidArgument, "re-classifier fractions must lie in (0, 1]");
  }
}

namespace {

// Positions with samples, ordered by average descending then position.
std::vector<std::pair<double, int>> ranked(std::span<const GradStats> stats) {
  std::vector<std::pair<double, int>> out;
  out.reserve(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    if (auto avg = stats[i].average()) out.emplace_back(*avg, int(i));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  return out;
}

std::size_t ceil_count(double fraction, std::size_t n) {
  return std::min(n, std::size_t(std::ceil(fraction * double(n) - 1e-12)));
}

}  // namespace

std::vector<int> dgr_select(std::span<const GradStats> planar, std::span<const GradStats> nonplanar,
                            const DgrParams& params, double min_average) {
  params.validate();
  const auto np = ranked(nonplanar);
  const auto pl = ranked(planar);
  if (np.empty()) {
    if (!pl.empty()) warn("re-classifier: no non-planar statistics, nothing reverted");
    return {};
  }
  const std::size_t top_np = std::max<std::size_t>(1, ceil_count(params.nonplanar_fraction, np.size()));
  double threshold = 0.0;
  for (std::size_t i = 0; i < top_np; ++i) threshold += np[i].first;
  threshold /= double(top_np);
  threshold = std::max(threshold, min_average);

  std::vector<int> out;
  const std::size_t top_pl = ceil_count(params.planar_fraction, pl.size());
  for (std::size_t i = 0; i < top_pl; ++i) {
    if (pl[i].first > threshold) out.push_back(pl[i].second);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Eigen::Vector2d weight_gradient(const PlaneBasis& basis, const Vec3& g) {
  return {basis.e1().dot(g), basis.e2().dot(g)};
}

void optimize_step(std::vector<ParamPoint>& points, std::vector<PlaneBasis>& bases, std::span<const Vec3> grads,
                   double lr_point, double lr_basis, Exec exec) {
  if (grads.size() != points.size()) throw Error(ErrorCode::DimensionMismatch, "gradient count differs from point count");
  if (!(lr_point >= 0.0) || !(lr_basis >= 0.0)) throw Error(ErrorCode::InvalidArgument, "learning rates must be non-negative");
  if (lr_basis > lr_point) throw Error(ErrorCode::InvalidArgument, "lr_basis must not exceed lr_point");
  for (const auto& p : points) {
    if (const auto* pl = std::get_if<PlanarParam>(&p)) {
      if (pl->plane_id < 0 || std::size_t(pl->plane_id) >= bases.size()) {
        throw Error(ErrorCode::InvalidArgument, "planar point references a missing plane");
      }
    }
  }

  const std::vector<PlaneBasis> old = bases;
  const std::vector<ParamPoint> before = lr_basis > 0.0 ? points : std::vector<ParamPoint>{};
  const std::int64_t n = std::int64_t(points.size());
  auto point_update = [&](std::int64_t i) {
    ParamPoint& p = points[i];
    if (auto* free = std::get_if<FreeParam>(&p)) {
      free->xyz -= lr_point * grads[i];
    } else {
      auto& pl = std::get<PlanarParam>(p);
      const Eigen::Vector2d gw = weight_gradient(old[pl.plane_id], grads[i]);
      pl.bary.w1 -= lr_point * gw.x();
      pl.bary.w2 -= lr_point * gw.y();
    }
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) point_update(i);
  } else {
    for (std::int64_t i = 0; i < n; ++i) point_update(i);
  }

  if (lr_basis == 0.0) return;
  // serial, index-ordered reduction keeps the result independent of threads
  std::vector<PlaneBasis> acc(bases.size(), PlaneBasis{});
  std::vector<char> touched(bases.size(), 0);
  for (std::int64_t i = 0; i < n; ++i) {
    const auto* pl = std::get_if<PlanarParam>(&before[i]);
    if (!pl) continue;
    const double w1 = pl->bary.w1;
    const double w2 = pl->bary.w2;
    PlaneBasis& a = acc[pl->plane_id];
    a.f1 += w1 * grads[i];
    a.f2 += w2 * grads[i];
    a.f3 += (1.0 - w1 - w2) * grads[i];
    touched[pl->plane_id] = 1;
  }
  for (std::size_t k = 0; k < bases.size(); ++k) {
    if (!touched[k]) continue;
    bases[k].f1 = old[k].f1 - lr_basis * acc[k].f1;
    bases[k].f2 = old[k].f2 - lr_basis * acc[k].f2;
    bases[k].f3 = old[k].f3 - lr_basis * acc[k].f3;
  }
}

double fit_loss(std::span<const ParamPoint> points, std::span<const PlaneBasis> bases, std::span<const Vec3> targets) {
  if (points.size() != targets.size()) throw Error(ErrorCode::DimensionMismatch, "target count differs from point count");
  double loss = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) loss += (reconstruct(points[i], bases) - targets[i]).squaredNorm();
  return loss;
}

FitResult fit_planar_scene(std::vector<ParamPoint> points, std::vector<PlaneBasis> bases,
                           std::span<const Vec3> targets, const FitParams& params, std::uint64_t seed, Exec exec) {
  params.schedule.validate();
  params.dgr.validate();
  if (targets.size() != points.size()) throw Error(ErrorCode::DimensionMismatch, "target count differs from point count");
  if (!params.target_jitter.empty() && params.target_jitter.size() != points.size()) {
    throw Error(ErrorCode::DimensionMismatch, "jitter count differs from point count");
  }
  if (params.iterations < 0) throw Error(ErrorCode::InvalidArgument, "iterations must be non-negative");

  const std::size_t n = points.size();
  FitResult result;
  std::vector<GradStats> stats(n);
  std::vector<char> reverted(n, 0);
  std::vector<Vec3> pos(n), grads(n);
  bool first_window_done = false;

  auto count_planar = [&] {
    return int(std::count_if(points.begin(), points.end(), [](const ParamPoint& p) { return is_planar(p); }));
  };
  auto record = [&](int iter) {
    result.trace.push_back({iter, fit_loss(points, bases, targets), count_planar(),
                            int(std::count(reverted.begin(), reverted.end(), char(1)))});
  };

  for (int it = 0; it < params.iterations; ++it) {
    record(it);
    for (std::size_t i = 0; i < n; ++i) pos[i] = reconstruct(points[i], bases);
    if (!params.target_jitter.empty()) {
      Rng rng(derive_seed(seed, std::uint64_t(it)));
      std::normal_distribution<double> normal(0.0, 1.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double s = params.target_jitter[i];
        Vec3 xi(normal(rng), normal(rng), normal(rng));
        grads[i] = 2.0 * (pos[i] - targets[i] - s * xi);
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) grads[i] = 2.0 * (pos[i] - targets[i]);
    }

    const bool active = dgr_active(it, params.schedule);
    if (active) {
      for (std::size_t i = 0; i < n; ++i) stats[i].add(grads[i].norm());
    }

    optimize_step(points, bases, grads, params.lr_point, params.lr_basis, exec);

    if (active && !dgr_active(it + 1, params.schedule)) {
      std::vector<GradStats> planar_stats, nonplanar_stats;
      std::vector<int> planar_index;
      for (std::size_t i = 0; i < n; ++i) {
        if (is_planar(points[i])) {
          planar_stats.push_back(stats[i]);
          planar_index.push_back(int(i));
        } else {
          nonplanar_stats.push_back(stats[i]);
        }
      }
      for (int local : dgr_select(planar_stats, nonplanar_stats, params.dgr, params.min_gradient)) {
        const int i = planar_index[local];
        points[i] = FreeParam{reconstruct(points[i], bases)};
        reverted[i] = 1;
      }
      std::fill(stats.begin(), stats.end(), GradStats{});
      if (!first_window_done) {
        first_window_done = true;
        for (std::size_t i = 0; i < n; ++i) {
          if (reverted[i]) result.reverted_first_window.push_back(int(i));
        }
      }
    }
  }
  record(params.iterations);

  for (std::size_t i = 0; i < n; ++i) {
    if (reverted[i]) result.reverted.push_back(int(i));
  }
  result.points = std::move(points);
  result.bases = std::move(bases);
  return result;
}

}  // namespace planekit
