#include "emden/sweep.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "emden/integrator.hpp"
#include "emden/trajectory_io.hpp"

namespace emden {

namespace {

namespace fs = std::filesystem;

template <class T>
std::vector<T> axis_or(const std::vector<T>& axis, T fallback) {
  return axis.empty() ? std::vector<T>{fallback} : axis;
}

json run_cell(const RunConfig& cfg, std::size_t index, const ProblemParams& params,
              const fs::path& dir) {
  json cell{{"index", index}, {"params", params}};
  try {
    const DerivedConstants dc = derive_constants(params);
    const RegimeFlags flags = classify_regime(params, dc);
    cell["constants"] = dc;
    cell["regime"] = flags;

    Trajectory traj;
    json reports;
    if (flags.theorem3_case != Theorem3Case::None) {
      const End from = flags.theorem3_case == Theorem3Case::SingularAtInfinity ? End::Infinity
                                                                                : End::Origin;
      const ConnectingOrbit orbit =
          connecting_orbit(params, dc, from, cfg.connect.eps, cfg.connect_config(from));
      cell["run"] = from == End::Infinity ? "connect_from_infinity" : "connect_from_origin";
      reports[to_string(from)] = orbit.near_report;
      reports[to_string(orbit.far_report.end)] = orbit.far_report;
      traj = orbit.trajectory;
    } else {
      ShotResult shot = shoot(cfg.sweep.a, params, cfg.shooting_config());
      if (!shot.error.empty()) {
        throw std::runtime_error(shot.error);
      }
      cell["run"] = "regular_shot";
      ClassificationReport origin;
      try {
        origin = classify_end(shot.trajectory, dc, End::Origin, cfg.classifier);
      } catch (const InsufficientData& e) {
        origin.end = End::Origin;
        origin.note = e.what();
      }
      reports["origin"] = origin;
      reports["infinity"] = shot.report;
      traj = std::move(shot.trajectory);
    }
    json ordered;
    ordered["origin"] = reports["origin"];
    ordered["infinity"] = reports["infinity"];
    cell["kinds"] = {{"origin", ordered["origin"]["kind"]}, {"infinity", ordered["infinity"]["kind"]}};
    cell["reports"] = ordered;

    const fs::path rel = fs::path("cells") / std::to_string(index) / "trajectory.csv";
    fs::create_directories((dir / rel).parent_path());
    write_trajectory_file((dir / rel).string(), traj);
    cell["trajectory"] = rel.generic_string();
    cell["status"] = "ok";
  } catch (const std::exception& e) {
    cell["status"] = "failed";
    cell["error"] = e.what();
  }
  return cell;
}

}  // namespace

std::vector<ProblemParams> sweep_grid(const RunConfig& cfg) {
  std::vector<ProblemParams> grid;
  for (int n : axis_or(cfg.sweep.n, cfg.params.n)) {
    for (double p : axis_or(cfg.sweep.p, cfg.params.p)) {
      for (double q : axis_or(cfg.sweep.q, cfg.params.q)) {
        for (double l1 : axis_or(cfg.sweep.l1, cfg.params.l1)) {
          for (double l2 : axis_or(cfg.sweep.l2, cfg.params.l2)) {
            ProblemParams cell = cfg.params;
            cell.n = n;
            cell.p = p;
            cell.q = q;
            cell.l1 = l1;
            cell.l2 = l2;
            grid.push_back(cell);
          }
        }
      }
    }
  }
  return grid;
}

unsigned default_jobs() {
  if (const char* env = std::getenv("EMDEN_JOBS")) {
    char* end = nullptr;
    const long k = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && k > 0) {
      return static_cast<unsigned>(k);
    }
  }
  return 1;
}

SweepResult run_sweep(const RunConfig& cfg, unsigned jobs, const fs::path& out_root, bool force) {
  const std::vector<ProblemParams> grid = sweep_grid(cfg);
  if (grid.empty()) {
    throw std::invalid_argument("sweep: empty grid");
  }
  SweepResult result;
  result.dir = out_root / cfg.run_id();
  const fs::path manifest_path = result.dir / "manifest.json";
  if (!force && fs::exists(manifest_path)) {
    std::ifstream is(manifest_path);
    result.manifest = json::parse(is);
    result.reused = true;
    for (const json& cell : result.manifest.at("cells")) {
      result.failed_cells += cell.at("status") != "ok";
    }
    return result;
  }
  fs::create_directories(result.dir);

  std::vector<json> cells(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      cells[i] = run_cell(cfg, i, grid[i], result.dir);
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(grid.size())));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < workers; ++j) {
    pool.emplace_back(worker);
  }
  worker();
  for (std::thread& t : pool) {
    t.join();
  }

  json axes{{"n", axis_or(cfg.sweep.n, cfg.params.n)},
            {"p", axis_or(cfg.sweep.p, cfg.params.p)},
            {"q", axis_or(cfg.sweep.q, cfg.params.q)},
            {"l1", axis_or(cfg.sweep.l1, cfg.params.l1)},
            {"l2", axis_or(cfg.sweep.l2, cfg.params.l2)}};
  json manifest{{"tool", "emden"},
                {"version", kToolVersion},
                {"config_hash", cfg.hash_hex()},
                {"run_id", cfg.run_id()},
                {"axes", axes},
                {"cell_count", grid.size()},
                {"cells", cells}};
  for (const json& cell : cells) {
    result.failed_cells += cell.at("status") != "ok";
  }
  std::ofstream os(manifest_path, std::ios::binary);
  if (!os) {
    throw std::runtime_error("cannot write " + manifest_path.string());
  }
  os << manifest.dump(2) << '\n';
  result.manifest = std::move(manifest);
  return result;
}

}  // namespace emden
