#include "planekit/synth.hpp"

#include "planekit/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <tuple>

namespace planekit {

namespace {

struct Box2 {
  Vec2 lo, hi;
  bool overlaps(const Box2& o) const {
    return lo.x() < o.hi.x() && o.lo.x() < hi.x() && lo.y() < o.hi.y() && o.lo.y() < hi.y();
  }
  bool inside(const Box2& o) const {
    return lo.x() >= o.lo.x() && lo.y() >= o.lo.y() && hi.x() <= o.hi.x() && hi.y() <= o.hi.y();
  }
};

Box2 footprint(const BoxSpec& b) {
  const Vec2 h(0.5 * b.size.x(), 0.5 * b.size.y());
  return {b.center - h, b.center + h};
}

Box2 table_box(const SceneSpec& s) {
  return {s.table_center - 0.5 * s.table_size, s.table_center + 0.5 * s.table_size};
}

std::vector<Box2> leg_boxes(const SceneSpec& s) {
  const Box2 t = table_box(s);
  std::vector<Box2> legs;
  for (int i = 0; i < 4; ++i) {
    const double x = (i & 1) ? t.hi.x() - s.leg_inset - s.leg_size : t.lo.x() + s.leg_inset;
    const double y = (i & 2) ? t.hi.y() - s.leg_inset - s.leg_size : t.lo.y() + s.leg_inset;
    legs.push_back({{x, y}, {x + s.leg_size, y + s.leg_size}});
  }
  return legs;
}

class Builder {
 public:
  explicit Builder(SynthScene& scene) : scene_(scene) {}

  // Surface on the plane {x_axis = level}, facing +axis when sign > 0.
  // `lo`/`hi` bound the two other axes (axis+1, axis+2) and `holes` are
  // removed rectangles in the same coordinates.
  void surface(const std::string& name, int axis, double level, int sign, const Vec2& lo, const Vec2& hi,
               const std::vector<Box2>& holes = {}) {
    const int id = int(scene_.planes.size());
    const int a = (axis + 1) % 3, b = (axis + 2) % 3;
    std::vector<double> xs{lo.x(), hi.x()}, ys{lo.y(), hi.y()};
    for (const Box2& h : holes) {
      xs.push_back(std::clamp(h.lo.x(), lo.x(), hi.x()));
      xs.push_back(std::clamp(h.hi.x(), lo.x(), hi.x()));
      ys.push_back(std::clamp(h.lo.y(), lo.y(), hi.y()));
      ys.push_back(std::clamp(h.hi.y(), lo.y(), hi.y()));
    }
    auto uniq = [](std::vector<double>& v) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    uniq(xs);
    uniq(ys);
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
        const Vec2 c(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1]));
        bool in_hole = false;
        for (const Box2& h : holes) {
          if (c.x() > h.lo.x() && c.x() < h.hi.x() && c.y() > h.lo.y() && c.y() < h.hi.y()) in_hole = true;
        }
        if (in_hole) continue;
        Vec3 origin = Vec3::Zero();
        origin[axis] = level;
        origin[a] = xs[i];
        origin[b] = ys[j];
        Vec3 ea = Vec3::Zero(), eb = Vec3::Zero();
        ea[a] = xs[i + 1] - xs[i];
        eb[b] = ys[j + 1] - ys[j];
        Rect3 r;
        r.origin = origin;
        r.du = sign > 0 ? ea : eb;
        r.dv = sign > 0 ? eb : ea;
        r.plane_id = id;
        area += r.area();
        scene_.rects.push_back(r);
      }
    }
    Vec3 n = Vec3::Zero();
    n[axis] = sign > 0 ? 1.0 : -1.0;
    Vec3 p = Vec3::Zero();
    p[axis] = level;
    scene_.planes.push_back({id, PlaneEq::through(p, n), name, area});
  }

  // Four vertical sides of an axis-aligned box, facing outwards.
  void box_sides(const std::string& name, const Box2& fp, double z0, double z1) {
    // (axis+1, axis+2) for axis x is (y, z); for axis y it is (z, x)
    surface(name + "_x-", 0, fp.lo.x(), -1, {fp.lo.y(), z0}, {fp.hi.y(), z1});
    surface(name + "_x+", 0, fp.hi.x(), +1, {fp.lo.y(), z0}, {fp.hi.y(), z1});
    surface(name + "_y-", 1, fp.lo.y(), -1, {z0, fp.lo.x()}, {z1, fp.hi.x()});
    surface(name + "_y+", 1, fp.hi.y(), +1, {z0, fp.lo.x()}, {z1, fp.hi.x()});
  }

 private:
  SynthScene& scene_;
};

}  // namespace

void SceneSpec::validate() const {
  if (!(room.minCoeff() > 0.0)) throw Error(ErrorCode::InvalidArgument, "room extents must be positive");
  if (views < 0 || width <= 0 || height <= 0 || !(focal > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "invalid camera ring settings");
  }
  const Box2 room_box{{-0.5 * room.x(), -0.5 * room.y()}, {0.5 * room.x(), 0.5 * room.y()}};
  Box2 support = room_box;
  double support_z = 0.0;
  std::vector<Box2> taken;
  if (table) {
    const Box2 t = table_box(*this);
    if (!t.inside(room_box) || !(table_height > table_thickness) || !(table_thickness > 0.0) ||
        table_height >= room.z()) {
      throw Error(ErrorCode::InvalidArgument, "table does not fit in the room");
    }
    if (!(leg_size > 0.0) || 2.0 * (leg_inset + leg_size) >= std::min(table_size.x(), table_size.y())) {
      throw Error(ErrorCode::InvalidArgument, "invalid table legs");
    }
    support = t;
    support_z = table_height;
  }
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const Box2 fp = footprint(boxes[i]);
    if (!(boxes[i].size.minCoeff() > 0.0)) throw Error(ErrorCode::InvalidArgument, "box sizes must be positive");
    if (!fp.inside(support) || support_z + boxes[i].size.z() >= room.z()) {
      throw Error(ErrorCode::InvalidArgument, "object does not rest inside its support");
    }
    for (const Box2& o : taken) {
      if (fp.overlaps(o)) throw Error(ErrorCode::InvalidArgument, "intersecting objects");
    }
    taken.push_back(fp);
  }
}

SceneSpec SceneSpec::empty_room() { return SceneSpec{}; }

SceneSpec SceneSpec::desk_with_boxes(int count) {
  SceneSpec s;
  s.table = true;
  const std::vector<BoxSpec> all{
      {{0.24, 0.20, 0.18}, {-0.05, 0.35}},
      {{0.16, 0.16, 0.26}, {0.35, 0.05}},
      {{0.20, 0.14, 0.12}, {0.70, 0.40}},
  };
  for (int i = 0; i < count && i < int(all.size()); ++i) s.boxes.push_back(all[i]);
  return s;
}

SynthScene build_scene(const SceneSpec& spec) {
  spec.validate();
  SynthScene scene;
  scene.spec = spec;
  Builder b(scene);
  const double hx = 0.5 * spec.room.x(), hy = 0.5 * spec.room.y(), hz = spec.room.z();

  std::vector<Box2> floor_holes, top_holes;
  if (spec.table) {
    floor_holes = leg_boxes(spec);
  }
  for (const BoxSpec& box : spec.boxes) (spec.table ? top_holes : floor_holes).push_back(footprint(box));

  b.surface("floor", 2, 0.0, +1, {-hx, -hy}, {hx, hy}, floor_holes);
  b.surface("ceiling", 2, hz, -1, {-hx, -hy}, {hx, hy});
  b.surface("wall_x-", 0, -hx, +1, {-hy, 0.0}, {hy, hz});
  b.surface("wall_x+", 0, hx, -1, {-hy, 0.0}, {hy, hz});
  b.surface("wall_y-", 1, -hy, +1, {0.0, -hx}, {hz, hx});
  b.surface("wall_y+", 1, hy, -1, {0.0, -hx}, {hz, hx});

  if (spec.table) {
    const Box2 t = table_box(spec);
    const double top = spec.table_height, bottom = spec.table_height - spec.table_thickness;
    b.surface("table_top", 2, top, +1, t.lo, t.hi, top_holes);
    b.surface("table_bottom", 2, bottom, -1, t.lo, t.hi, leg_boxes(spec));
    b.box_sides("table_side", t, bottom, top);
    const auto legs = leg_boxes(spec);
    for (std::size_t i = 0; i < legs.size(); ++i) b.box_sides("leg" + std::to_string(i), legs[i], 0.0, bottom);
  }
  const double base = spec.table ? spec.table_height : 0.0;
  for (std::size_t i = 0; i < spec.boxes.size(); ++i) {
    const Box2 fp = footprint(spec.boxes[i]);
    const double z1 = base + spec.boxes[i].size.z();
    b.surface("box" + std::to_string(i) + "_top", 2, z1, +1, fp.lo, fp.hi);
    b.box_sides("box" + std::to_string(i), fp, base, z1);
  }

  for (const Rect3& r : scene.rects) {
    const int v0 = int(scene.gt_mesh.vertices.size());
    scene.gt_mesh.vertices.push_back(r.at(0, 0));
    scene.gt_mesh.vertices.push_back(r.at(1, 0));
    scene.gt_mesh.vertices.push_back(r.at(1, 1));
    scene.gt_mesh.vertices.push_back(r.at(0, 1));
    for (int k = 0; k < 4; ++k) scene.gt_mesh.plane_id.push_back(r.plane_id);
    scene.gt_mesh.faces.push_back({v0, v0 + 1, v0 + 2});
    scene.gt_mesh.faces.push_back({v0, v0 + 2, v0 + 3});
  }

  for (int i = 0; i < spec.views; ++i) {
    const double th = 2.0 * M_PI * double(i) / double(spec.views);
    const Vec3 eye(spec.ring_radius * std::cos(th), spec.ring_radius * std::sin(th), spec.ring_height);
    const double tz = spec.target_height + (i % 2 ? spec.target_swing : -spec.target_swing);
    scene.cameras.push_back(Camera::look_at(eye, Vec3(0.0, 0.0, tz), Vec3::UnitZ(), spec.focal,
                                            spec.focal, spec.width, spec.height));
  }
  return scene;
}

LabeledCloud sample_surface(const SynthScene& scene, std::size_t count, std::uint64_t seed) {
  LabeledCloud out;
  if (scene.rects.empty() || count == 0) return out;
  std::vector<double> areas;
  for (const Rect3& r : scene.rects) areas.push_back(r.area());
  Rng rng(seed);
  std::discrete_distribution<std::size_t> pick(areas.begin(), areas.end());
  out.points.reserve(count);
  out.labels.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Rect3& r = scene.rects[pick(rng)];
    const double s = uniform01(rng), t = uniform01(rng);
    out.points.push_back(r.at(s, t));
    out.labels.push_back(r.plane_id);
  }
  return out;
}

LabeledCloud sample_surface_stratified(const SynthScene& scene, double spacing, std::uint64_t seed) {
  if (!(spacing > 0.0)) throw Error(ErrorCode::InvalidArgument, "spacing must be positive");
  LabeledCloud out;
  Rng rng(seed);
  for (const Rect3& r : scene.rects) {
    const int na = std::max(1, int(std::ceil(r.du.norm() / spacing)));
    const int nb = std::max(1, int(std::ceil(r.dv.norm() / spacing)));
    for (int j = 0; j < nb; ++j) {
      for (int i = 0; i < na; ++i) {
        const double s = (i + uniform01(rng)) / na, t = (j + uniform01(rng)) / nb;
        out.points.push_back(r.at(s, t));
        out.labels.push_back(r.plane_id);
      }
    }
  }
  return out;
}

Vec3 sample_vmf(const Vec3& mean, double kappa, std::uint64_t seed) {
  if (!(kappa > 0.0)) return mean;
  Rng rng(seed);
  // Wood (1994) for the 3-sphere: w = 1 + log(u + (1 - u) e^{-2 kappa}) / kappa
  const double u = uniform01(rng);
  const double w = 1.0 + std::log(u + (1.0 - u) * std::exp(-2.0 * kappa)) / kappa;
  const double phi = 2.0 * M_PI * uniform01(rng);
  const Vec3 m = mean.normalized();
  const Vec3 a = std::abs(m.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 e1 = (a - a.dot(m) * m).normalized();
  const Vec3 e2 = m.cross(e1);
  const double r = std::sqrt(std::max(0.0, 1.0 - w * w));
  return (w * m + r * (std::cos(phi) * e1 + std::sin(phi) * e2)).normalized();
}

RenderedView render_view(const SynthScene& scene, const Camera& camera, const RenderOptions& options,
                         std::uint64_t seed) {
  camera.validate();
  const int w = camera.width, h = camera.height;
  RenderedView out;
  out.normals = NormalMap(w, h);
  out.depth = DepthMap(w, h);
  out.instances = LabelImage(w, h);
  out.exact_depth.assign(std::size_t(w) * h, 0.0);
  const Vec3 c = camera.center();

  std::vector<Vec3> normals;
  std::vector<double> inv_du, inv_dv;
  for (const Rect3& r : scene.rects) {
    normals.push_back(r.normal());
    inv_du.push_back(1.0 / r.du.squaredNorm());
    inv_dv.push_back(1.0 / r.dv.squaredNorm());
  }

#pragma omp parallel for schedule(dynamic, 4)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Vec3 d = camera.ray_direction(x, y);
      double best_t = INFINITY;
      int best = -1;
      for (int k = 0; k < int(scene.rects.size()); ++k) {
        const Rect3& r = scene.rects[k];
        const double denom = normals[k].dot(d);
        if (std::abs(denom) < 1e-12) continue;
        const double t = normals[k].dot(r.origin - c) / denom;
        if (!(t > 1e-9) || t >= best_t) continue;
        const Vec3 rel = c + t * d - r.origin;
        const double s = rel.dot(r.du) * inv_du[k], q = rel.dot(r.dv) * inv_dv[k];
        if (s < 0.0 || s > 1.0 || q < 0.0 || q > 1.0) continue;
        best_t = t;
        best = k;
      }
      if (best < 0) continue;
      const std::size_t pix = std::size_t(y) * w + x;
      const Rect3& r = scene.rects[best];
      const double z = camera.to_camera(c + best_t * d).z();
      out.exact_depth[pix] = z;
      out.depth.data[pix] = float(z);
      out.instances.labels[pix] = r.plane_id + 1;
      Vec3 n = scene.planes[r.plane_id].plane.normal;
      if (options.normal_kappa > 0.0) n = sample_vmf(n, options.normal_kappa, derive_seed(seed, pix));
      out.normals.data[pix] = n.cast<float>();
    }
  }

  if (options.mask_erosion > 0) {
    const int e = options.mask_erosion;
    std::vector<int> eroded(out.instances.labels.size(), 0);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int l = out.instances.at(x, y);
        if (l == 0) continue;
        bool keep = true;
        for (int dy = -e; dy <= e && keep; ++dy) {
          for (int dx = -e; dx <= e && keep; ++dx) {
            const int xx = x + dx, yy = y + dy;
            if (xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
            if (out.instances.at(xx, yy) != l) keep = false;
          }
        }
        if (keep) eroded[std::size_t(y) * w + x] = l;
      }
    }
    out.instances.labels = std::move(eroded);
  }
  return out;
}

namespace {

// Lattice coordinates covering [a, b]: the end points, every break point
// inside, and every multiple of e that is at least e/4 away from all break
// points. Rects sharing an edge therefore agree on its vertices.
std::vector<double> lattice(double a, double b, double e, const std::vector<double>& breaks) {
  std::vector<double> v{a, b};
  for (double x : breaks) {
    if (x > a + 1e-9 && x < b - 1e-9) v.push_back(x);
  }
  const long k0 = long(std::ceil(a / e));
  const long k1 = long(std::floor(b / e));
  for (long k = k0; k <= k1; ++k) {
    const double x = double(k) * e;
    if (x <= a || x >= b) continue;
    const auto it = std::lower_bound(breaks.begin(), breaks.end(), x);
    const bool near_break = (it != breaks.end() && *it - x < 0.25 * e) || (it != breaks.begin() && x - *(it - 1) < 0.25 * e);
    if (!near_break) v.push_back(x);
  }
  std::sort(v.begin(), v.end());
  return v;
}

int axis_of(const Vec3& d) {
  int a = 0;
  d.cwiseAbs().maxCoeff(&a);
  return a;
}

}  // namespace

std::size_t lattice_vertex_count(const Rect3& rect, double edge_len) {
  const int a = axis_of(rect.du), b = axis_of(rect.dv);
  const double a0 = rect.origin[a], b0 = rect.origin[b];
  const double a1 = a0 + rect.du[a], b1 = b0 + rect.dv[b];
  return lattice(a0, a1, edge_len, {a0, a1}).size() * lattice(b0, b1, edge_len, {b0, b1}).size();
}

TriMesh perturb_dense_mesh(std::span<const Rect3> rects, double edge_len, double noise_sigma, std::uint64_t seed) {
  if (!(edge_len > 0.0)) throw Error(ErrorCode::InvalidArgument, "edge_len must be positive");
  if (!(noise_sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise_sigma must be non-negative");
  TriMesh mesh;
  std::vector<Vec3> vertex_normal;
  std::map<std::tuple<long long, long long, long long>, int> weld;
  auto vertex = [&](const Vec3& p, const Rect3& r) {
    const auto key = std::make_tuple(std::llround(p.x() * 1e7), std::llround(p.y() * 1e7), std::llround(p.z() * 1e7));
    auto it = weld.find(key);
    if (it != weld.end()) return it->second;
    const int id = int(mesh.vertices.size());
    weld.emplace(key, id);
    mesh.vertices.push_back(p);
    mesh.plane_id.push_back(r.plane_id);
    vertex_normal.push_back(r.normal());
    return id;
  };

  std::array<std::vector<double>, 3> breaks;
  for (const Rect3& r : rects) {
    for (int c = 0; c < 3; ++c) {
      breaks[c].push_back(r.origin[c]);
      breaks[c].push_back(r.origin[c] + r.du[c] + r.dv[c]);
    }
  }
  for (auto& b : breaks) {
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end(), [](double x, double y) { return y - x < 1e-9; }), b.end());
  }
  for (const Rect3& r : rects) {
    const int a = axis_of(r.du), b = axis_of(r.dv);
    const auto xs = lattice(r.origin[a], r.origin[a] + r.du[a], edge_len, breaks[a]);
    const auto ys = lattice(r.origin[b], r.origin[b] + r.dv[b], edge_len, breaks[b]);
    std::vector<int> ids(xs.size() * ys.size());
    for (std::size_t j = 0; j < ys.size(); ++j) {
      for (std::size_t i = 0; i < xs.size(); ++i) {
        Vec3 p = r.origin;
        p[a] = xs[i];
        p[b] = ys[j];
        ids[j * xs.size() + i] = vertex(p, r);
      }
    }
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
      for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const int v00 = ids[j * xs.size() + i], v10 = ids[j * xs.size() + i + 1];
        const int v01 = ids[(j + 1) * xs.size() + i], v11 = ids[(j + 1) * xs.size() + i + 1];
        mesh.faces.push_back({v00, v10, v11});
        mesh.faces.push_back({v00, v11, v01});
      }
    }
  }

  if (noise_sigma > 0.0) {
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, noise_sigma);
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) mesh.vertices[v] += normal(rng) * vertex_normal[v];
  }
  return mesh;
}

}  // namespace planekit
