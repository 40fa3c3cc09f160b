#include "planekit/perception.hpp"

#include "planekit/random.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

namespace planekit {

int LabelImage::max_label() const {
  int m = 0;
  for (int l : labels) m = std::max(m, l);
  return m;
}

MaskSet masks_from_labels(const LabelImage& image) {
  std::map<int, std::vector<int>> by_id;
  for (std::size_t i = 0; i < image.labels.size(); ++i) {
    if (image.labels[i] != 0) by_id[image.labels[i]].push_back(int(i));
  }
  MaskSet out;
  out.width = image.width;
  out.height = image.height;
  for (auto& [id, pixels] : by_id) out.masks.push_back(std::move(pixels));
  return out;
}

double RegionSimilarity::pass_ratio(double alpha) const {
  if (sims.empty()) return 0.0;
  const auto pass = std::count_if(sims.begin(), sims.end(), [alpha](double s) { return s > alpha; });
  return double(pass) / double(sims.size());
}

RegionSimilarity region_similarity(std::span<const Vec3> normals) {
  if (normals.empty()) throw Error(ErrorCode::InvalidArgument, "region_similarity: empty region");
  Vec3 sum = Vec3::Zero();
  for (const Vec3& n : normals) sum += n;
  const double len = sum.norm();
  if (!(len > 1e-12 * double(normals.size()))) throw Error(ErrorCode::Degenerate, "degenerate region");
  RegionSimilarity out;
  out.mean_normal = sum / len;
  out.sims.reserve(normals.size());
  for (const Vec3& n : normals) out.sims.push_back(n.dot(out.mean_normal));
  return out;
}

namespace {

double squared_distance(const double* a, const double* b, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

int nearest_centroid(const double* p, const std::vector<double>& centroids, int k, int dim) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int c = 0; c < k; ++c) {
    const double d = squared_distance(p, &centroids[std::size_t(c) * dim], dim);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

}  // namespace

KMeansResult kmeans(std::span<const double> data, int dim, int k, std::uint64_t seed, int max_iterations) {
  if (dim < 1 || k < 1) throw Error(ErrorCode::InvalidArgument, "kmeans: dim and k must be positive");
  if (data.size() % std::size_t(dim) != 0) throw Error(ErrorCode::InvalidArgument, "kmeans: ragged data");
  const std::size_t n = data.size() / std::size_t(dim);
  if (n < std::size_t(k)) throw Error(ErrorCode::InvalidArgument, "kmeans: fewer points than clusters");

  Rng rng(seed);
  KMeansResult out;
  out.dim = dim;
  out.centroids.assign(std::size_t(k) * dim, 0.0);
  auto point = [&](std::size_t i) { return &data[i * dim]; };
  auto set_centroid = [&](int c, const double* p) { std::copy(p, p + dim, &out.centroids[std::size_t(c) * dim]); };

  // k-means++ seeding
  set_centroid(0, point(uniform_index(rng, n)));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(point(i), &out.centroids[0], dim);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t pick = 0;
    if (total > 0.0) {
      const double r = uniform01(rng) * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > r && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
    }
    // total == 0: every point coincides with a chosen centroid, duplicate it
    set_centroid(c, point(pick));
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(point(i), &out.centroids[std::size_t(c) * dim], dim));
    }
  }

  out.assignment.assign(n, -1);
  std::vector<int> next(n);
  std::vector<double> sums(std::size_t(k) * dim);
  std::vector<std::size_t> counts(k);
  for (int iter = 0; iter <= max_iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) next[i] = nearest_centroid(point(i), out.centroids, k, dim);
    if (next == out.assignment || iter == max_iterations) {
      out.assignment = next;
      break;
    }
    out.assignment = next;
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const int c = out.assignment[i];
      ++counts[c];
      for (int d = 0; d < dim; ++d) sums[std::size_t(c) * dim + d] += point(i)[d];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its centroid
      for (int d = 0; d < dim; ++d) out.centroids[std::size_t(c) * dim + d] = sums[std::size_t(c) * dim + d] / double(counts[c]);
    }
  }
  return out;
}

std::vector<int> largest_component_4(std::span<const int> pixels, int width, int height) {
  if (pixels.empty()) return {};
  std::vector<std::uint8_t> member(std::size_t(width) * height, 0);
  for (int p : pixels) member[p] = 1;
  std::vector<int> best;
  std::vector<int> current;
  std::deque<int> queue;
  for (int seed : pixels) {
    if (member[seed] != 1) continue;
    current.clear();
    member[seed] = 2;
    queue.push_back(seed);
    while (!queue.empty()) {
      const int p = queue.front();
      queue.pop_front();
      current.push_back(p);
      const int x = p % width;
      const int y = p / width;
      const int nbrs[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
      for (const auto& q : nbrs) {
        if (q[0] < 0 || q[1] < 0 || q[0] >= width || q[1] >= height) continue;
        const int qi = q[1] * width + q[0];
        if (member[qi] == 1) {
          member[qi] = 2;
          queue.push_back(qi);
        }
      }
    }
    // strict comparison keeps the first-found component on ties
    if (current.size() > best.size()) best = current;
  }
  std::sort(best.begin(), best.end());
  return best;
}

namespace {

void detect_recursive(const NormalMap& normals, std::span<const int> mask, double alpha, int sigma,
                      std::uint64_t seed, bool allow_split, std::vector<PlaneProposal>& out) {
  std::vector<int> valid_pixels;
  std::vector<Vec3> valid_normals;
  valid_pixels.reserve(mask.size());
  valid_normals.reserve(mask.size());
  for (int p : mask) {
    const Eigen::Vector3f& n = normals.data[p];
    if (!NormalMap::valid(n)) continue;
    valid_pixels.push_back(p);
    valid_normals.push_back(n.cast<double>().normalized());
  }
  if (valid_pixels.empty()) return;

  bool planar = false;
  RegionSimilarity sim;
  try {
    sim = region_similarity(valid_normals);
    planar = sim.pass_ratio(alpha) >= kPlanarPassRatio;
  } catch (const Error&) {
    planar = false;  // cancelling normals cannot be one plane
  }

  if (planar) {
    std::vector<int> passing;
    for (std::size_t i = 0; i < valid_pixels.size(); ++i) {
      if (sim.sims[i] > alpha) passing.push_back(valid_pixels[i]);
    }
    PlaneProposal proposal;
    proposal.pixels = largest_component_4(passing, normals.width, normals.height);
    Vec3 sum = Vec3::Zero();
    for (int p : proposal.pixels) sum += normals.data[p].cast<double>().normalized();
    proposal.mean_normal = sum.normalized();
    out.push_back(std::move(proposal));
    return;
  }

  if (!allow_split || int(valid_pixels.size()) <= sigma) return;

  std::vector<double> flat;
  flat.reserve(valid_normals.size() * 3);
  for (const Vec3& n : valid_normals) flat.insert(flat.end(), {n.x(), n.y(), n.z()});
  const KMeansResult km = kmeans(flat, 3, 2, seed);
  for (int c = 0; c < 2; ++c) {
    std::vector<int> cluster;
    for (std::size_t i = 0; i < valid_pixels.size(); ++i) {
      if (km.assignment[i] == c) cluster.push_back(valid_pixels[i]);
    }
    if (!cluster.empty()) detect_recursive(normals, cluster, alpha, sigma, seed, false, out);
  }
}

}  // namespace

std::vector<PlaneProposal> detect_planes_in_mask(const NormalMap& normals, std::span<const int> mask,
                                                 double alpha, int sigma, std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0,1)");
  if (sigma < 1) throw Error(ErrorCode::InvalidArgument, "sigma must be >= 1");
  const int n_pixels = normals.width * normals.height;
  for (int p : mask) {
    if (p < 0 || p >= n_pixels) throw Error(ErrorCode::InvalidArgument, "mask pixel outside image bounds");
  }
  std::vector<PlaneProposal> out;
  detect_recursive(normals, mask, alpha, sigma, seed, true, out);
  return out;
}

PlaneMaskImage merge_proposals(const std::vector<PlaneProposal>& proposals, int width, int height,
                               double alpha) {
  PlaneMaskImage image(width, height);
  std::vector<std::vector<int>> sorted(proposals.size());
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    sorted[i] = proposals[i].pixels;
    std::sort(sorted[i].begin(), sorted[i].end());
    sorted[i].erase(std::unique(sorted[i].begin(), sorted[i].end()), sorted[i].end());
  }
  std::vector<bool> consumed(proposals.size(), false);
  int next_id = 1;
  for (std::size_t k = 0; k < proposals.size(); ++k) {
    if (consumed[k]) continue;
    consumed[k] = true;
    std::vector<int> merged = sorted[k];
    for (std::size_t l = k + 1; l < proposals.size(); ++l) {
      if (consumed[l]) continue;
      if (proposals[k].mean_normal.dot(proposals[l].mean_normal) > alpha) {
        std::vector<int> uni;
        uni.reserve(merged.size() + sorted[l].size());
        std::set_union(merged.begin(), merged.end(), sorted[l].begin(), sorted[l].end(),
                       std::back_inserter(uni));
        merged = std::move(uni);
        consumed[l] = true;
      }
    }
    bool any = false;
    for (int p : merged) {
      if (image.labels[p] == 0) {
        image.labels[p] = next_id;
        any = true;
      }
    }
    if (any) ++next_id;
  }
  return image;
}

void validate(const PerceptionParams& params) {
  if (!(params.alpha > 0.0 && params.alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0,1)");
  if (params.sigma < 1) throw Error(ErrorCode::InvalidArgument, "sigma must be >= 1");
}

PlaneMaskImage detect_view_planes(const NormalMap& normals, const MaskSet& masks,
                                  const PerceptionParams& params, std::uint64_t seed) {
  validate(params);
  if (normals.width != masks.width || normals.height != masks.height) {
    throw Error(ErrorCode::DimensionMismatch, "normal map and masks differ in size");
  }
  std::vector<PlaneProposal> proposals;
  for (std::size_t j = 0; j < masks.masks.size(); ++j) {
    auto found = detect_planes_in_mask(normals, masks.masks[j], params.alpha, params.sigma, derive_seed(seed, j));
    for (auto& p : found) proposals.push_back(std::move(p));
  }
  return merge_proposals(proposals, normals.width, normals.height, params.alpha);
}

}  // namespace planekit
