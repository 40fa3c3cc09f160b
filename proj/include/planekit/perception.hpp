#pragma once

// Single-view planar region detection from a normal map and mask proposals.

#include "planekit/common.hpp"
#include "planekit/image.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace planekit {

/// Fraction of region pixels that must pass the similarity test.
inline constexpr double kPlanarPassRatio = 0.7;

struct RegionSimilarity {
  Vec3 mean_normal;
  std::vector<double> sims;

  /// Fraction of sims strictly greater than alpha.
  double pass_ratio(double alpha) const;
};

/// Normalized mean of the normals and the cosine of each normal against it.
/// Throws on an empty region or when the normals cancel out.
RegionSimilarity region_similarity(std::span<const Vec3> normals);

struct KMeansResult {
  int dim = 0;
  std::vector<int> assignment;
  std::vector<double> centroids;  ///< k * dim, row-major

  double centroid(int cluster, int axis) const { return centroids[std::size_t(cluster) * dim + axis]; }
};

/// Lloyd's algorithm from a seeded k-means++ start. `data` holds
/// `data.size() / dim` row-major points. Ties go to the lower cluster index.
KMeansResult kmeans(std::span<const double> data, int dim, int k, std::uint64_t seed,
                    int max_iterations = 100);

struct PlaneProposal {
  std::vector<int> pixels;  ///< sorted linear pixel indices
  Vec3 mean_normal = Vec3::UnitZ();
};

/// Planarity test on one mask: accept the largest 4-connected component of
/// passing pixels when at least 70% of valid pixels pass; otherwise split
/// by 2-means on the normals (once) when the mask is larger than sigma.
std::vector<PlaneProposal> detect_planes_in_mask(const NormalMap& normals, std::span<const int> mask,
                                                 double alpha, int sigma, std::uint64_t seed);

/// Greedy merge of proposals with similar mean normals into exclusive labels.
PlaneMaskImage merge_proposals(const std::vector<PlaneProposal>& proposals, int width, int height,
                               double alpha);

struct PerceptionParams {
  double alpha = kDefaultAlpha;
  int sigma = kDefaultSigma;
};

void validate(const PerceptionParams& params);

/// Full single-view pipeline: per-mask detection then merging.
PlaneMaskImage detect_view_planes(const NormalMap& normals, const MaskSet& masks,
                                  const PerceptionParams& params, std::uint64_t seed);

/// Largest 4-connected component of `pixels` in a width x height grid.
std::vector<int> largest_component_4(std::span<const int> pixels, int width, int height);

}  // namespace planekit
