#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixfd/io.hpp"

namespace mixfd {

enum class Monotonicity : std::uint8_t { increasing, decreasing, non_monotone };

std::string to_string(Monotonicity m);

/// Strict monotonicity of a sequence; fewer than two values are non-monotone.
Monotonicity classify(std::span<const double> values);

struct TrendPoint {
  double penetration = 0.0;
  double q_max = 0.0;
  double k_crit = 0.0;
};

struct CapacityTrend {
  std::string intersection;
  std::vector<TrendPoint> points;     // usable cells in penetration order
  std::vector<double> missing;        // penetrations whose cell is flagged or absent of q_max
  std::optional<Monotonicity> monotone;  // absent when incomplete

  bool complete() const { return monotone.has_value(); }
};

/// One trend per intersection, in label order. Only cells flagged "ok" count;
/// any other cell makes the trend incomplete, as does having < 2 usable cells.
std::vector<CapacityTrend> trend_table(std::span<const FitRow> fits);

struct CapacitySpread {
  double penetration = 0.0;
  std::size_t intersections = 0;
  double min = 0.0;
  double max = 0.0;
  double range = 0.0;
  std::string min_intersection;
  std::string max_intersection;
};

/// q_max spread across intersections for every penetration that has at least
/// one usable cell.
std::vector<CapacitySpread> variability_summary(std::span<const FitRow> fits);

/// Markdown report: fit table, capacity trends and variability.
std::string render_report(std::span<const FitRow> fits);

}  // namespace mixfd
