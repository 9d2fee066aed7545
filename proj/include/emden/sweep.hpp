#pragma once

#include <filesystem>
#include <vector>

#include "emden/run_config.hpp"
#include "emden/serialize.hpp"

namespace emden {

inline constexpr const char* kToolVersion = "0.1.0";

/// Cartesian product n x p x q x l1 x l2 (n outermost); empty axes fall back to [params].
[[nodiscard]] std::vector<ProblemParams> sweep_grid(const RunConfig& cfg);

struct SweepResult {
  std::filesystem::path dir;
  json manifest;
  std::size_t failed_cells = 0;
  /// True when an existing manifest for the same config hash was returned unchanged.
  bool reused = false;
};

/// Runs every cell (up to `jobs` at a time) and writes
///   <out_root>/<run-id>/manifest.json
///   <out_root>/<run-id>/cells/<index>/trajectory.csv
/// Cells with a singular connecting solution are seeded at the singular end; the rest are
/// regular shots of height sweep.a. A failing cell is recorded and the sweep continues.
SweepResult run_sweep(const RunConfig& cfg, unsigned jobs, const std::filesystem::path& out_root,
                      bool force = false);

/// EMDEN_JOBS when set to a positive integer, otherwise 1.
[[nodiscard]] unsigned default_jobs();

}  // namespace emden
