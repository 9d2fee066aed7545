#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "emden/sweep.hpp"

using namespace emden;
namespace fs = std::filesystem;

namespace {
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("emden_test_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunConfig small_sweep() {
  RunConfig cfg;
  cfg.sweep.p = {1.8, 1.85, 1.9};
  cfg.sweep.q = {1.95, 2.0, 2.05};
  return cfg;
}
}  // namespace

TEST_CASE("grid order and fallback") {
  RunConfig cfg = small_sweep();
  const std::vector<ProblemParams> grid = sweep_grid(cfg);
  REQUIRE(grid.size() == 9);
  CHECK(grid[0].p == 1.8);
  CHECK(grid[0].q == 1.95);
  CHECK(grid[1].q == 2.0);
  CHECK(grid[3].p == 1.85);
  for (const ProblemParams& p : grid) {
    CHECK(p.n == cfg.params.n);
    CHECK(p.l2 == cfg.params.l2);
  }
  cfg.sweep = {};
  CHECK(sweep_grid(cfg).size() == 1);
}

TEST_CASE("sweep output does not depend on the worker count") {
  TempDir one("one");
  TempDir many("many");
  const RunConfig cfg = small_sweep();
  const SweepResult a = run_sweep(cfg, 1, one.path);
  const SweepResult b = run_sweep(cfg, 8, many.path);
  CHECK(a.dir.filename() == cfg.run_id());
  CHECK(a.failed_cells == 0);
  CHECK(a.manifest["cell_count"] == 9);
  CHECK(a.manifest["config_hash"] == cfg.hash_hex());
  CHECK(slurp(a.dir / "manifest.json") == slurp(b.dir / "manifest.json"));
  for (int i = 0; i < 9; ++i) {
    const fs::path rel = fs::path("cells") / std::to_string(i) / "trajectory.csv";
    REQUIRE(fs::exists(a.dir / rel));
    CHECK(slurp(a.dir / rel) == slurp(b.dir / rel));
  }
}

TEST_CASE("a failing cell is recorded and the rest run") {
  TempDir dir("fail");
  RunConfig cfg;
  cfg.sweep.p = {1.0, 1.9};
  const SweepResult r = run_sweep(cfg, 2, dir.path);
  CHECK(r.failed_cells == 1);
  const json& cells = r.manifest["cells"];
  REQUIRE(cells.size() == 2);
  CHECK(cells[0]["status"] == "failed");
  CHECK(!cells[0]["error"].get<std::string>().empty());
  CHECK(cells[1]["status"] == "ok");
}

TEST_CASE("an existing run is reused unless forced") {
  TempDir dir("reuse");
  RunConfig cfg;
  const SweepResult first = run_sweep(cfg, 1, dir.path);
  CHECK_FALSE(first.reused);
  const SweepResult second = run_sweep(cfg, 1, dir.path);
  CHECK(second.reused);
  CHECK(second.manifest == first.manifest);
  const SweepResult forced = run_sweep(cfg, 1, dir.path, true);
  CHECK_FALSE(forced.reused);
}

TEST_CASE("worker count from the environment") {
  ::setenv("EMDEN_JOBS", "3", 1);
  CHECK(default_jobs() == 3);
  ::setenv("EMDEN_JOBS", "zero", 1);
  CHECK(default_jobs() == 1);
  ::unsetenv("EMDEN_JOBS");
  CHECK(default_jobs() == 1);
}
