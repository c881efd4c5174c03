#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mixfd {

struct RunResult;

/// Least-squares parabola Q = a k^2 + b k + c through (k, Q) points.
struct QuadraticFit {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  // Undefined when every Q is identical.
  std::optional<double> r_squared;
  std::size_t n_points = 0;
  // Vertex of the parabola; present whenever a != 0.
  std::optional<double> k_crit;
  std::optional<double> q_max;

  double evaluate(double k) const { return (a * k + b) * k + c; }
};

struct FlowPoint {
  double k = 0.0;
  double q = 0.0;
};

/// Throws DegenerateInputError with fewer than three distinct k values or a
/// rank-deficient system.
QuadraticFit fit_quadratic(std::span<const FlowPoint> points);

/// Sum of squared residuals of an arbitrary parabola over the points.
double residual_sum_of_squares(std::span<const FlowPoint> points, double a, double b, double c);

struct Capacity {
  double k_crit = 0.0;
  double q_max = 0.0;
};

/// Vertex of a concave fit. Throws NonConcaveFitError when a >= 0.
Capacity extract_capacity(const QuadraticFit& fit);

/// (intersection label, penetration) identifying one cell of the sweep.
using CellKey = std::pair<std::string, double>;

enum class FitStatus : std::uint8_t { ok, non_concave, degenerate, faulted };

struct CellFit {
  FitStatus status = FitStatus::ok;
  std::optional<QuadraticFit> fit;  // absent when degenerate or faulted
  std::string reason;               // empty when ok
  std::vector<FlowPoint> points;    // pooled samples of the cell
};

/// "ok", "non_concave", "degenerate: ..." or "fault: ...".
std::string flag_text(const CellFit& cell);

/// One fit per (intersection, penetration) cell over all seeds' samples.
/// Cells containing a faulted run are reported without a fit.
std::map<CellKey, CellFit> fit_all(std::span<const RunResult> results);

}  // namespace mixfd
