#pragma once

#include "planekit/common.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace planekit {

/// Per-pixel unit normals, row-major, top row first. (0,0,0) marks an
/// invalid pixel.
struct NormalMap {
  int width = 0;
  int height = 0;
  bool world_frame = true;
  std::vector<Eigen::Vector3f> data;

  NormalMap() = default;
  NormalMap(int w, int h) : width(w), height(h), data(std::size_t(w) * h, Eigen::Vector3f::Zero()) {}

  const Eigen::Vector3f& at(int x, int y) const { return data[std::size_t(y) * width + x]; }
  Eigen::Vector3f& at(int x, int y) { return data[std::size_t(y) * width + x]; }
  static bool valid(const Eigen::Vector3f& n) { return n.squaredNorm() > 0.0f; }
};

/// Per-pixel z-depth in meters; 0 marks a miss.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  DepthMap() = default;
  DepthMap(int w, int h) : width(w), height(h), data(std::size_t(w) * h, 0.0f) {}

  float at(int x, int y) const { return data[std::size_t(y) * width + x]; }
};

/// Raw mask proposals for one view. Each mask is a sorted list of linear
/// pixel indices; masks may overlap.
struct MaskSet {
  int width = 0;
  int height = 0;
  std::vector<std::vector<int>> masks;
};

/// Integer label image. For plane masks, 0 is non-planar and every other
/// value is a plane instance; each pixel carries exactly one label.
struct LabelImage {
  int width = 0;
  int height = 0;
  std::vector<int> labels;

  LabelImage() = default;
  LabelImage(int w, int h) : width(w), height(h), labels(std::size_t(w) * h, 0) {}

  int at(int x, int y) const { return labels[std::size_t(y) * width + x]; }
  int max_label() const;
};

using PlaneMaskImage = LabelImage;

/// Splits an instance-ID image into one mask per non-zero ID, ordered by ID.
MaskSet masks_from_labels(const LabelImage& image);

}  // namespace planekit
