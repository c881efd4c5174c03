#pragma once

// Independent reference computations the library is checked against. None of
// these call into the code under test.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oracle {

struct Point {
  double x, y;
};

using Polyline = std::vector<Point>;

inline double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

inline bool on_segment(Point p, Point a, Point b) {
  return std::min(a.x, b.x) - 1e-12 <= p.x && p.x <= std::max(a.x, b.x) + 1e-12 &&
         std::min(a.y, b.y) - 1e-12 <= p.y && p.y <= std::max(a.y, b.y) + 1e-12;
}

// Closed segments intersect (touching counts).
inline bool segments_meet(Point a, Point b, Point c, Point d) {
  const double d1 = cross(c, d, a), d2 = cross(c, d, b), d3 = cross(a, b, c), d4 = cross(a, b, d);
  constexpr double eps = 1e-9;
  if (((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps)))
    return true;
  if (std::abs(d1) <= eps && on_segment(a, c, d)) return true;
  if (std::abs(d2) <= eps && on_segment(b, c, d)) return true;
  if (std::abs(d3) <= eps && on_segment(c, a, b)) return true;
  if (std::abs(d4) <= eps && on_segment(d, a, b)) return true;
  return false;
}

inline bool polylines_meet(const Polyline& p, const Polyline& q) {
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    for (std::size_t j = 0; j + 1 < q.size(); ++j)
      if (segments_meet(p[i], p[i + 1], q[j], q[j + 1])) return true;
  return false;
}

inline Point rotate(Point p, int quarter_turns) {
  for (int i = 0; i < ((quarter_turns % 4) + 4) % 4; ++i) p = {-p.y, p.x};
  return p;
}

enum class Turn { through, left, right };

// Path of a vehicle through a square junction box of half-width h, drawn for
// the south leg (entering northbound, keep right) and rotated onto `leg`
// (0 S, 1 E, 2 N, 3 W counterclockwise). `offset` is the lane centre's
// distance from the road axis.
inline Polyline junction_path(int leg, Turn turn, double h, double offset, int samples = 400) {
  Polyline path;
  switch (turn) {
    case Turn::through:
      for (int i = 0; i <= samples; ++i) path.push_back({offset, -h + 2.0 * h * i / samples});
      break;
    case Turn::right: {
      const Point centre{h, -h};
      const double r = h - offset;
      for (int i = 0; i <= samples; ++i) {
        const double t = std::numbers::pi - (std::numbers::pi / 2.0) * i / samples;
        path.push_back({centre.x + r * std::cos(t), centre.y + r * std::sin(t)});
      }
      break;
    }
    case Turn::left: {
      const Point centre{-h, -h};
      const double r = h + offset;
      for (int i = 0; i <= samples; ++i) {
        const double t = (std::numbers::pi / 2.0) * i / samples;
        path.push_back({centre.x + r * std::cos(t), centre.y + r * std::sin(t)});
      }
      break;
    }
  }
  for (auto& p : path) p = rotate(p, leg);
  return path;
}

inline double polyline_length(const Polyline& p) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) total += std::hypot(p[i + 1].x - p[i].x, p[i + 1].y - p[i].y);
  return total;
}

// Two movements conflict when their paths share any point, except movements
// that start from the same lane and only diverge.
inline bool paths_conflict(const Polyline& p, const Polyline& q) {
  const bool same_start = std::hypot(p.front().x - q.front().x, p.front().y - q.front().y) < 1e-9;
  if (same_start) return false;
  return polylines_meet(p, q);
}

// IDM equilibrium gap at speed v behind a leader at the same speed, solved by
// bisection on 1 - (v/v0)^delta - (s*/s)^2 = 0.
inline double idm_equilibrium_gap(double v, double v0, double delta, double s0, double T) {
  const double s_star = s0 + v * T;
  auto f = [&](double s) { return 1.0 - std::pow(v / v0, delta) - (s_star / s) * (s_star / s); };
  double lo = 1e-6, hi = 1e6;
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Greedy maximal conflict-free subset under a priority order, found by
// enumerating every subset: the chosen subset is the feasible one whose
// membership bitmask, read from highest to lowest priority, is largest.
// `order[i]` lists proposal indices by priority; `go[i]` marks go proposals.
template <class Conflicts, class Blocked>
std::vector<bool> brute_force_grants(std::size_t n, const std::vector<std::size_t>& order, const std::vector<bool>& go,
                                     Conflicts conflicts, Blocked blocked) {
  std::uint64_t best_key = 0;
  std::uint32_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    bool feasible = true;
    for (std::size_t i = 0; i < n && feasible; ++i) {
      if (!(mask >> i & 1u)) continue;
      if (!go[i] || blocked(i)) feasible = false;
      for (std::size_t j = i + 1; j < n && feasible; ++j)
        if ((mask >> j & 1u) && conflicts(i, j)) feasible = false;
    }
    if (!feasible) continue;
    std::uint64_t key = 0;
    for (const std::size_t i : order) key = key << 1 | (mask >> i & 1u);
    if (key >= best_key) {
      best_key = key;
      best = mask;
    }
  }
  std::vector<bool> granted(n);
  for (std::size_t i = 0; i < n; ++i) granted[i] = best >> i & 1u;
  return granted;
}

}  // namespace oracle
