#pragma once

// Small fixtures shared by the unit tests.

#include "planekit/common.hpp"
#include "planekit/mesh.hpp"
#include "planekit/random.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace testing {

using namespace planekit;

/// Regular (nx x ny) grid of squares on z = 0 spanning [0, sx] x [0, sy].
inline TriMesh grid_mesh(int nx, int ny, double sx, double sy) {
  TriMesh m;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) m.vertices.emplace_back(sx * i / nx, sy * j / ny, 0.0);
  }
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      m.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return m;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("planekit_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline Points3 random_points(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  Points3 out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(scale * uniform01(rng), scale * uniform01(rng), scale * uniform01(rng));
  return out;
}

}  // namespace testing
