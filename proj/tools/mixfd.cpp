#include <CLI11.hpp>

#include <chrono>
#include <iostream>

#include "mixfd/cli.hpp"
#include "mixfd/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Mixed human/RV traffic at unsignalized intersections: density sweeps and fundamental diagrams"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::size_t jobs = 0;
  bool no_plots = false;
  std::string seed_list;
  auto* sweep = app.add_subcommand("sweep", "Simulate the configured plan and fit every cell");
  sweep->add_option("--config", config_path, "YAML config (defaults when omitted)");
  sweep->add_option("--out", out_dir, "Output directory (overrides output.dir)");
  sweep->add_option("--jobs", jobs, "Parallel runs (overrides jobs)")->check(CLI::PositiveNumber);
  sweep->add_flag("--no-plots", no_plots, "Skip SVG output");
  sweep->add_option("--seed-override", seed_list, "Comma-separated seeds replacing plan.seeds");

  std::string runs_path;
  std::string fit_out;
  bool fit_no_plots = false;
  auto* fit = app.add_subcommand("fit", "Refit an existing runs.csv");
  fit->add_option("runs", runs_path, "runs.csv to fit")->required();
  fit->add_option("--out", fit_out, "Output directory (defaults to the directory of runs.csv)");
  fit->add_flag("--no-plots", fit_no_plots, "Skip SVG output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mixfd::kExitConfigError;
  }

  try {
    mixfd::CommandResult result;
    const auto start = std::chrono::steady_clock::now();
    if (*sweep) {
      auto config = config_path.empty() ? mixfd::parse_config("") : mixfd::load_config(config_path);
      if (!out_dir.empty()) config.out_dir = out_dir;
      if (jobs > 0) config.jobs = jobs;
      if (no_plots) config.emit_plots = false;
      if (!seed_list.empty()) config.plan.seeds = mixfd::parse_seed_list(seed_list);
      result = mixfd::cmd_sweep(config);
    } else {
      const std::filesystem::path runs(runs_path);
      const auto out = fit_out.empty() ? runs.parent_path() : std::filesystem::path(fit_out);
      result = mixfd::cmd_fit(runs, out.empty() ? "." : out, !fit_no_plots);
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << result.runs << " runs, " << result.cells << " cells, " << result.faulted_runs << " faulted runs in "
              << seconds << " s\n";
    for (const auto& path : result.written) std::cerr << "wrote " << path.string() << '\n';
    if (result.exit_code == mixfd::kExitAllFaulted)
      std::cerr << result.fully_faulted_cells << " cell(s) had every run fault\n";
    return result.exit_code;
  } catch (const mixfd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return mixfd::kExitConfigError;
  } catch (const mixfd::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return mixfd::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
