#include "planekit/common.hpp"
#include "planekit/parallel.hpp"

#include <omp.h>

#include <atomic>
#include <iostream>

namespace planekit {

namespace {
std::atomic<bool> g_warnings{true};
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Degenerate: return "degenerate";
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::Io: return "io";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::UnexpectedEof: return "unexpected_eof";
    case ErrorCode::MissingFile: return "missing_file";
    case ErrorCode::Schema: return "schema";
  }
  return "unknown";
}

void warn(const std::string& message) {
  if (g_warnings.load()) std::cerr << "warning: " << message << '\n';
}

void set_warnings_enabled(bool enabled) { g_warnings.store(enabled); }

void set_num_threads(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

int num_threads() { return omp_get_max_threads(); }

}  // namespace planekit
