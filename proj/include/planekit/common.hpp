#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace planekit {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

using Points2 = std::vector<Vec2, Eigen::aligned_allocator<Vec2>>;
using Points3 = std::vector<Vec3>;

enum class ErrorCode {
  InvalidArgument,
  Degenerate,
  DimensionMismatch,
  Io,
  Parse,
  UnexpectedEof,
  MissingFile,
  Schema,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable category. The CLI prints
/// `error: <category>: <message>` on one line.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Default hyperparameters.
inline constexpr double kDefaultAlpha = 0.98;
inline constexpr int kDefaultSigma = 200;
inline constexpr double kDefaultDelta = 0.005;

/// Non-fatal diagnostics go through here so the CLI can silence them.
void warn(const std::string& message);
void set_warnings_enabled(bool enabled);

}  // namespace planekit
