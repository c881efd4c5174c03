#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mixfd/experiment.hpp"
#include "mixfd/fdfit.hpp"

namespace mixfd {

inline constexpr std::string_view kRunsHeader = "intersection,penetration,seed,vehicle_count,window_start,k,Q,V";
inline constexpr std::string_view kFitsHeader =
    "intersection,penetration,a,b,c,r_squared,k_crit,q_max,n_points,flag";
inline constexpr std::string_view kFaultsHeader = "intersection,penetration,seed,vehicle_count,reason";

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Parses a whole field as a double; nullopt on trailing junk or overflow.
std::optional<double> parse_double(std::string_view text);

/// Commas and line breaks become ';' so free text fits in one CSV field.
std::string csv_text(std::string_view text);

/// One fits.csv row. Optional columns are written empty when absent.
struct FitRow {
  std::string intersection;
  double penetration = 0.0;
  std::optional<double> a, b, c, r_squared, k_crit, q_max;
  std::size_t n_points = 0;
  std::string flag;
};

std::vector<FitRow> fit_rows(const std::map<CellKey, CellFit>& table);

void write_runs_csv(std::ostream& out, std::span<const RunResult> results);
void write_fits_csv(std::ostream& out, std::span<const FitRow> rows);
void write_faults_csv(std::ostream& out, std::span<const RunResult> results);

/// Rebuilds run results from runs.csv, plus faulted runs from faults.csv
/// when given. Throws InputError naming the offending line.
std::vector<RunResult> read_runs_csv(std::istream& runs, std::istream* faults = nullptr);

std::vector<FitRow> read_fits_csv(std::istream& in);

}  // namespace mixfd
