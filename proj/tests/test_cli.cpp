#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mixfd/cli.hpp"
#include "mixfd/errors.hpp"
#include "mixfd/io.hpp"

using namespace mixfd;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("mixfd_test_cli_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

constexpr const char* kSmallConfig = R"(
plan:
  intersections: [229, tjunction]
  penetrations: [0.0, 1.0]
  seeds: [1, 2]
  density_levels: [4, 20, 45, 80, 110]
  run_duration: 300
jobs: 2
)";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("empty config is the default sweep") {
    const auto c = parse_config("");
    CHECK(sweep_size(c.plan) == 720);
    CHECK(c.jobs == 1);
    CHECK(c.emit_plots);
    CHECK(c.out_dir == "out");
  }

  TEST_CASE("config values are read") {
    const auto c = parse_config(R"(
plan:
  intersections: [332]
  penetrations: [0.5]
  seeds: [9]
  run_duration: 600
detector:
  region: full_circuit
  window: 30
dynamics:
  time_headway: 1.2
coordination:
  critical_gap: 0
output:
  dir: results
  plots: false
jobs: 3
)");
    CHECK(c.plan.intersections == std::vector<IntersectionKind>{IntersectionKind::fourway_2lane});
    CHECK(c.plan.seeds == std::vector<std::uint64_t>{9});
    CHECK(c.plan.sim.run_duration == 600.0);
    CHECK(c.plan.sim.detector.region == DetectorRegion::full_circuit);
    CHECK(c.plan.sim.detector.window == 30.0);
    CHECK(c.plan.sim.idm.time_headway == 1.2);
    CHECK(c.plan.sim.human.critical_gap == 0.0);
    CHECK(c.out_dir == "results");
    CHECK_FALSE(c.emit_plots);
    CHECK(c.jobs == 3);
  }

  TEST_CASE("invalid configs are rejected") {
    CHECK_THROWS_AS(parse_config("plan: {colour: red}"), ConfigError);
    CHECK_THROWS_AS(parse_config("speed: 3"), ConfigError);
    CHECK_THROWS_AS(parse_config("plan: {penetrations: [1.5]}"), ConfigError);
    CHECK_THROWS_AS(parse_config("plan: {intersections: [roundabout]}"), ConfigError);
    CHECK_THROWS_AS(parse_config("plan: {seeds: [x]}"), ConfigError);
    CHECK_THROWS_AS(parse_config("jobs: 0"), ConfigError);
    CHECK_THROWS_AS(parse_config("dynamics: {time_headway: -1}"), ConfigError);
    CHECK_THROWS_AS(parse_config("plan: [1, 2"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/mixfd.yaml"), ConfigError);
  }

  TEST_CASE("seed lists") {
    CHECK(parse_seed_list("1,2,3") == std::vector<std::uint64_t>{1, 2, 3});
    CHECK(parse_seed_list("42") == std::vector<std::uint64_t>{42});
    CHECK_THROWS_AS(parse_seed_list(""), ConfigError);
    CHECK_THROWS_AS(parse_seed_list("1,,2"), ConfigError);
    CHECK_THROWS_AS(parse_seed_list("1,-2"), ConfigError);
  }

  TEST_CASE("small sweep writes every output and refits identically") {
    auto config = parse_config(kSmallConfig);
    config.out_dir = scratch_dir("sweep");
    const auto result = cmd_sweep(config);
    CHECK(result.exit_code == kExitOk);
    CHECK(result.runs == 2 * 2 * 2 * 5);
    CHECK(result.cells == 4);
    for (const char* name : {"runs.csv", "faults.csv", "fits.csv", "report.md", "fd_229.svg", "fd_334.svg"})
      CHECK(std::filesystem::exists(config.out_dir / name));

    const auto refit = scratch_dir("refit");
    cmd_fit(config.out_dir / "runs.csv", refit, true);
    CHECK(slurp(refit / "fits.csv") == slurp(config.out_dir / "fits.csv"));
    CHECK(slurp(refit / "report.md") == slurp(config.out_dir / "report.md"));
    CHECK(slurp(refit / "fd_229.svg") == slurp(config.out_dir / "fd_229.svg"));

    auto quiet = config;
    quiet.emit_plots = false;
    quiet.jobs = 1;
    quiet.out_dir = scratch_dir("quiet");
    cmd_sweep(quiet);
    CHECK_FALSE(std::filesystem::exists(quiet.out_dir / "fd_229.svg"));
    CHECK(slurp(quiet.out_dir / "runs.csv") == slurp(config.out_dir / "runs.csv"));
    CHECK(slurp(quiet.out_dir / "fits.csv") == slurp(config.out_dir / "fits.csv"));
  }

  TEST_CASE("invalid plan writes nothing") {
    auto config = parse_config(kSmallConfig);
    config.out_dir = scratch_dir("invalid");
    config.plan.density_levels = {4, 100000};
    CHECK_THROWS_AS(cmd_sweep(config), ConfigError);
    CHECK_FALSE(std::filesystem::exists(config.out_dir));
  }

  TEST_CASE("cells where every run faults exit with code 2") {
    auto config = parse_config(R"(
plan:
  intersections: [229]
  penetrations: [0.0]
  seeds: [1]
  density_levels: [150, 200, 250]
  run_duration: 300
dynamics:
  wait_timeout: 0.5
)");
    config.out_dir = scratch_dir("faulted");
    const auto result = cmd_sweep(config);
    CHECK(result.exit_code == kExitAllFaulted);
    CHECK(result.faulted_runs == 3);
    CHECK(result.fully_faulted_cells == 1);
    std::ifstream fits(config.out_dir / "fits.csv");
    const auto rows = read_fits_csv(fits);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].flag.rfind("fault: ", 0) == 0);
    CHECK_FALSE(rows[0].a);

    const auto refit = scratch_dir("faulted_refit");
    const auto again = cmd_fit(config.out_dir / "runs.csv", refit, false);
    CHECK(again.exit_code == kExitAllFaulted);
    CHECK(slurp(refit / "fits.csv") == slurp(config.out_dir / "fits.csv"));
  }
}
