#include "planekit/common.hpp"
#include "planekit/parallel.hpp"
#include "planekit/random.hpp"

#include <doctest.h>

#include <set>

using namespace planekit;

TEST_CASE("error codes have stable names") {
  CHECK(to_string(ErrorCode::UnexpectedEof) == "unexpected_eof");
  CHECK(to_string(ErrorCode::MissingFile) == "missing_file");
  CHECK(to_string(ErrorCode::DimensionMismatch) == "dimension_mismatch");
  const Error e(ErrorCode::Schema, "bad");
  CHECK(e.code() == ErrorCode::Schema);
  CHECK(std::string(e.what()) == "bad");
}

TEST_CASE("derived seeds are deterministic and distinct") {
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 4; ++s) {
    for (std::uint64_t k = 0; k < 256; ++k) seen.insert(derive_seed(s, k));
  }
  CHECK(seen.size() == 4 * 256);
}

TEST_CASE("thread count can be set") {
  const int before = num_threads();
  set_num_threads(2);
  CHECK(num_threads() == 2);
  set_num_threads(before);
}
