#pragma once

// Gradient descent over the barycentric plane representation together with
// the dynamic re-classifier that reverts planar points to free coordinates.

#include "planekit/common.hpp"
#include "planekit/parallel.hpp"
#include "planekit/plane_param.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace planekit {

struct PlanarParam {
  int plane_id = 0;
  BarycentricPoint bary;
};

struct FreeParam {
  Vec3 xyz = Vec3::Zero();
};

using ParamPoint = std::variant<PlanarParam, FreeParam>;

inline bool is_planar(const ParamPoint& p) { return std::holds_alternative<PlanarParam>(p); }

/// Cartesian position of a point; throws if a planar point names a missing plane.
Vec3 reconstruct(const ParamPoint& p, std::span<const PlaneBasis> bases);

struct GradStats {
  double sum = 0.0;
  std::uint64_t count = 0;

  void add(double magnitude) {
    sum += magnitude;
    ++count;
  }
  std::optional<double> average() const {
    if (count == 0) return std::nullopt;
    return sum / double(count);
  }
};

struct DgrSchedule {
  int densify_start = 500;
  int densify_end = 15000;
  int densify_interval = 100;
  int window_tail = 50;
  int final_iter = 20000;
  int final_window = 100;

  void validate() const;
};

/// Active on the last `window_tail` iterations of every densification
/// interval and on [final_iter, final_iter + final_window).
bool dgr_active(long iter, const DgrSchedule& sched);
/// Last iteration of an active window.
bool dgr_window_end(long iter, const DgrSchedule& sched);
long dgr_active_count(long begin, long end, const DgrSchedule& sched);

struct DgrParams {
  double planar_fraction = 0.05;
  double nonplanar_fraction = 0.2;

  void validate() const;
};

/// Positions (into `planar`) of the points to revert: the top
/// ceil(planar_fraction * N) planar averages that exceed the mean of the top
/// ceil(nonplanar_fraction * M) non-planar averages. Ties are ranked by
/// position. Entries without samples are ignored; an empty non-planar side
/// reverts nothing. `min_average` is an extra absolute floor.
std::vector<int> dgr_select(std::span<const GradStats> planar, std::span<const GradStats> nonplanar,
                            const DgrParams& params = {}, double min_average = 0.0);

/// d|p - t|^2-style chain rule: gradient of a loss w.r.t. (w1, w2) given the
/// gradient `g` w.r.t. the reconstructed position.
Eigen::Vector2d weight_gradient(const PlaneBasis& basis, const Vec3& g);

/// One plain gradient-descent step. Planar weights step with lr_point; each
/// basis point steps with lr_basis on the sum of its members' chain-ruled
/// gradients (all gradients are taken at the pre-step state).
void optimize_step(std::vector<ParamPoint>& points, std::vector<PlaneBasis>& bases, std::span<const Vec3> grads,
                   double lr_point, double lr_basis, Exec exec = Exec::Parallel);

struct FitParams {
  DgrSchedule schedule;
  DgrParams dgr;
  int iterations = 2000;
  double lr_point = 0.1;
  double lr_basis = 0.01;
  /// Absolute floor on reverted averages; keeps converged points (whose
  /// gradients are rounding noise) from being reverted.
  double min_gradient = 1e-8;
  /// Optional per-point standard deviation of Gaussian target jitter, which
  /// models points whose residual never settles (textured, non-planar
  /// geometry). Empty means no jitter.
  std::vector<double> target_jitter;
};

struct FitTraceRow {
  int iteration = 0;
  double loss = 0.0;
  int planar = 0;
  int reverted = 0;
};

struct FitResult {
  std::vector<FitTraceRow> trace;  ///< one row per iteration plus the final state
  std::vector<ParamPoint> points;
  std::vector<PlaneBasis> bases;
  std::vector<int> reverted;  ///< ascending
  /// Reverted set right after the first re-classification window.
  std::vector<int> reverted_first_window;
};

double fit_loss(std::span<const ParamPoint> points, std::span<const PlaneBasis> bases, std::span<const Vec3> targets);

/// Gradient descent on sum |reconstruct(p_i) - target_i|^2 with the
/// re-classifier run at the end of every active window.
FitResult fit_planar_scene(std::vector<ParamPoint> points, std::vector<PlaneBasis> bases,
                           std::span<const Vec3> targets, const FitParams& params, std::uint64_t seed,
                           Exec exec = Exec::Parallel);

}  // namespace planekit
