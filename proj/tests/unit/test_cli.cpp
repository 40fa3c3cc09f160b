#include "helpers.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace {

struct Run {
  int code = -1;
  std::string err;
};

Run run_cli(const std::string& args, const std::filesystem::path& dir) {
  const auto err_path = dir / "stderr.txt";
  const std::string cmd = std::string(PLANEKIT_CLI) + " " + args + " > /dev/null 2> " + err_path.string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(err_path);
  std::stringstream ss;
  ss << in.rdbuf();
  r.err = ss.str();
  return r;
}

}  // namespace

TEST_CASE("command line reports errors with a code") {
  const auto dir = testing::temp_dir("cli_errors");
  const Run usage = run_cli("detect", dir);
  CHECK(usage.code == 2);
  CHECK(usage.err.rfind("error: usage:", 0) == 0);
  const Run missing = run_cli("info --scene " + (dir / "nowhere").string(), dir);
  CHECK(missing.code == 3 + int(planekit::ErrorCode::MissingFile));
  CHECK(missing.err.rfind("error: missing_file:", 0) == 0);
}

TEST_CASE("command line synthesizes and inspects a small scene") {
  const auto dir = testing::temp_dir("cli_synth");
  const auto scene = dir / "scene";
  const Run s = run_cli("synth --out " + scene.string() + " --views 2 --res 64x48 --cloud-points 500 --dense-edge 0.1 --quiet", dir);
  REQUIRE(s.code == 0);
  CHECK(std::filesystem::exists(scene / "manifest.json"));
  CHECK(std::filesystem::exists(scene / "cloud.ply"));
  const Run i = run_cli("info --scene " + scene.string(), dir);
  CHECK(i.code == 0);
  const Run bad = run_cli("synth --out " + scene.string() + " --res 64by48", dir);
  CHECK(bad.code == 3 + int(planekit::ErrorCode::InvalidArgument));
  CHECK(bad.err.rfind("error: invalid_argument:", 0) == 0);
}
