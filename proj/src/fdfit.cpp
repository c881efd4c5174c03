#include "mixfd/fdfit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <tuple>

#include "mixfd/errors.hpp"
#include "mixfd/experiment.hpp"

namespace mixfd {

namespace {

using Matrix3 = std::array<std::array<double, 3>, 3>;
using Vector3 = std::array<double, 3>;

// Gaussian elimination with partial pivoting; nullopt when a pivot vanishes
// relative to the largest matrix entry.
std::optional<Vector3> solve3(Matrix3 m, Vector3 rhs) {
  double scale = 0.0;
  for (const auto& row : m)
    for (const double x : row) scale = std::max(scale, std::abs(x));
  if (!(scale > 0.0)) return std::nullopt;
  for (std::size_t col = 0; col < 3; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    if (std::abs(m[pivot][col]) <= 1e-12 * scale) return std::nullopt;
    std::swap(m[pivot], m[col]);
    std::swap(rhs[pivot], rhs[col]);
    for (std::size_t r = col + 1; r < 3; ++r) {
      const double f = m[r][col] / m[col][col];
      for (std::size_t c = col; c < 3; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  Vector3 x{};
  for (std::size_t i = 3; i-- > 0;) {
    double acc = rhs[i];
    for (std::size_t c = i + 1; c < 3; ++c) acc -= m[i][c] * x[c];
    x[i] = acc / m[i][i];
  }
  return x;
}

}  // namespace

double residual_sum_of_squares(std::span<const FlowPoint> points, double a, double b, double c) {
  double sum = 0.0;
  for (const auto& p : points) {
    const double r = p.q - ((a * p.k + b) * p.k + c);
    sum += r * r;
  }
  return sum;
}

QuadraticFit fit_quadratic(std::span<const FlowPoint> points) {
  for (const auto& p : points) {
    if (!std::isfinite(p.k) || !std::isfinite(p.q)) throw DegenerateInputError("fit_quadratic: non-finite point");
  }
  std::vector<double> ks;
  ks.reserve(points.size());
  for (const auto& p : points) ks.push_back(p.k);
  std::sort(ks.begin(), ks.end());
  const auto distinct = static_cast<std::size_t>(std::unique(ks.begin(), ks.end()) - ks.begin());
  if (distinct < 3)
    throw DegenerateInputError("fit_quadratic: need at least 3 distinct k values, got " +
                               std::to_string(distinct));

  const auto n = static_cast<double>(points.size());
  double k_mean = 0.0;
  double q_mean = 0.0;
  for (const auto& p : points) {
    k_mean += p.k;
    q_mean += p.q;
  }
  k_mean /= n;
  q_mean /= n;
  double ss_tot = 0.0;
  double k_spread = 0.0;
  for (const auto& p : points) {
    ss_tot += (p.q - q_mean) * (p.q - q_mean);
    k_spread = std::max(k_spread, std::abs(p.k - k_mean));
  }

  QuadraticFit fit;
  fit.n_points = points.size();
  if (ss_tot == 0.0) {
    fit.c = points.front().q;
    return fit;
  }

  // Normal equations in u = (k - mean) / spread keep the moments O(1).
  Matrix3 m{};
  Vector3 rhs{};
  for (const auto& p : points) {
    const double u = (p.k - k_mean) / k_spread;
    const Vector3 basis{u * u, u, 1.0};
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t c = 0; c < 3; ++c) m[r][c] += basis[r] * basis[c];
      rhs[r] += basis[r] * p.q;
    }
  }
  const auto coeffs = solve3(m, rhs);
  if (!coeffs) throw DegenerateInputError("fit_quadratic: rank-deficient normal equations");
  const auto [alpha, beta, gamma] = *coeffs;

  const double s2 = k_spread * k_spread;
  fit.a = alpha / s2;
  fit.b = beta / k_spread - 2.0 * alpha * k_mean / s2;
  fit.c = gamma - beta * k_mean / k_spread + alpha * k_mean * k_mean / s2;

  const double ss_res = residual_sum_of_squares(points, fit.a, fit.b, fit.c);
  fit.r_squared = std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
  if (fit.a != 0.0) {
    fit.k_crit = -fit.b / (2.0 * fit.a);
    fit.q_max = fit.c - fit.b * fit.b / (4.0 * fit.a);
  }
  return fit;
}

Capacity extract_capacity(const QuadraticFit& fit) {
  if (!(fit.a < 0.0))
    throw NonConcaveFitError("extract_capacity: fit is not concave (a = " + std::to_string(fit.a) +
                             "); the densities never reached the congested branch");
  return {-fit.b / (2.0 * fit.a), fit.c - fit.b * fit.b / (4.0 * fit.a)};
}

std::string flag_text(const CellFit& cell) {
  switch (cell.status) {
    case FitStatus::ok: return "ok";
    case FitStatus::non_concave: return "non_concave";
    case FitStatus::degenerate: return "degenerate: " + cell.reason;
    case FitStatus::faulted: return "fault: " + cell.reason;
  }
  return "?";
}

std::map<CellKey, CellFit> fit_all(std::span<const RunResult> results) {
  std::map<CellKey, std::vector<const RunResult*>> cells;
  for (const auto& r : results) cells[{r.intersection, r.penetration}].push_back(&r);

  std::map<CellKey, CellFit> table;
  for (auto& [key, runs] : cells) {
    std::sort(runs.begin(), runs.end(), [](const RunResult* x, const RunResult* y) {
      return std::tie(x->seed, x->vehicle_count) < std::tie(y->seed, y->vehicle_count);
    });
    CellFit cell;
    for (const RunResult* run : runs) {
      if (run->fault && cell.status != FitStatus::faulted) {
        cell.status = FitStatus::faulted;
        cell.reason = "seed " + std::to_string(run->seed) + " vehicles " +
                      std::to_string(run->vehicle_count) + ": " + *run->fault;
      }
      for (const auto& s : run->samples) cell.points.push_back({s.k, s.q});
    }
    if (cell.status != FitStatus::faulted) {
      try {
        cell.fit = fit_quadratic(cell.points);
        cell.status = cell.fit->a < 0.0 ? FitStatus::ok : FitStatus::non_concave;
      } catch (const DegenerateInputError& e) {
        cell.status = FitStatus::degenerate;
        cell.reason = e.what();
      }
    }
    table.emplace(key, std::move(cell));
  }
  return table;
}

}  // namespace mixfd
