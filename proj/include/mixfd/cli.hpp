#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mixfd/experiment.hpp"

namespace mixfd {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitAllFaulted = 2;

struct CliConfig {
  ExperimentPlan plan;
  std::filesystem::path out_dir = "out";
  std::size_t jobs = 1;
  bool emit_plots = true;
};

/// Parses a YAML config. Missing keys keep their defaults, so an empty
/// document yields the default sweep; unknown keys are errors.
/// Throws ConfigError on anything invalid.
CliConfig parse_config(std::string_view yaml_text);
CliConfig load_config(const std::filesystem::path& path);

/// "1,2,3" -> {1, 2, 3}. Throws ConfigError.
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

struct CommandResult {
  int exit_code = kExitOk;
  std::size_t runs = 0;
  std::size_t faulted_runs = 0;
  std::size_t cells = 0;
  std::size_t fully_faulted_cells = 0;
  std::vector<std::filesystem::path> written;
};

/// Runs the plan and writes runs.csv, faults.csv, fits.csv, report.md and,
/// when enabled, fd_<intersection>.svg into out_dir. Nothing is written when
/// the config is invalid (ConfigError propagates). Exit code is
/// kExitAllFaulted when every run of some cell faulted.
CommandResult cmd_sweep(const CliConfig& config);

/// Refits a runs.csv (plus the faults.csv beside it, when present) and writes
/// fits.csv, report.md and optional plots into out_dir. Throws InputError on
/// malformed rows or when there is nothing to fit.
CommandResult cmd_fit(const std::filesystem::path& runs_csv, const std::filesystem::path& out_dir,
                      bool emit_plots);

}  // namespace mixfd
