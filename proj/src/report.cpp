#include "mixfd/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace mixfd {

namespace {

bool usable(const FitRow& row) { return row.flag == "ok" && row.q_max && row.k_crit; }

std::string fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

std::string percent(double fraction) { return fixed(fraction * 100.0, 0) + "%"; }

std::string cell(const std::optional<double>& value, int digits) {
  return value ? fixed(*value, digits) : "-";
}

}  // namespace

std::string to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::increasing: return "increasing";
    case Monotonicity::decreasing: return "decreasing";
    case Monotonicity::non_monotone: return "non-monotone";
  }
  return "?";
}

Monotonicity classify(std::span<const double> values) {
  if (values.size() < 2) return Monotonicity::non_monotone;
  bool up = true;
  bool down = true;
  for (std::size_t i = 1; i < values.size(); ++i) {
    up = up && values[i] > values[i - 1];
    down = down && values[i] < values[i - 1];
  }
  if (up) return Monotonicity::increasing;
  if (down) return Monotonicity::decreasing;
  return Monotonicity::non_monotone;
}

std::vector<CapacityTrend> trend_table(std::span<const FitRow> fits) {
  std::map<std::string, std::vector<const FitRow*>> by_intersection;
  for (const auto& row : fits) by_intersection[row.intersection].push_back(&row);

  std::vector<CapacityTrend> trends;
  for (auto& [id, rows] : by_intersection) {
    std::sort(rows.begin(), rows.end(),
              [](const FitRow* x, const FitRow* y) { return x->penetration < y->penetration; });
    CapacityTrend trend;
    trend.intersection = id;
    for (const FitRow* row : rows) {
      if (usable(*row))
        trend.points.push_back({row->penetration, *row->q_max, *row->k_crit});
      else
        trend.missing.push_back(row->penetration);
    }
    if (trend.missing.empty() && trend.points.size() >= 2) {
      std::vector<double> q;
      for (const auto& p : trend.points) q.push_back(p.q_max);
      trend.monotone = classify(q);
    }
    trends.push_back(std::move(trend));
  }
  return trends;
}

std::vector<CapacitySpread> variability_summary(std::span<const FitRow> fits) {
  std::map<double, CapacitySpread> spreads;
  for (const auto& row : fits) {
    if (!usable(row)) continue;
    const double q = *row.q_max;
    auto [it, inserted] = spreads.try_emplace(row.penetration);
    CapacitySpread& s = it->second;
    if (inserted) {
      s.penetration = row.penetration;
      s.min = s.max = q;
      s.min_intersection = s.max_intersection = row.intersection;
    }
    ++s.intersections;
    if (q < s.min || (q == s.min && row.intersection < s.min_intersection)) {
      s.min = q;
      s.min_intersection = row.intersection;
    }
    if (q > s.max || (q == s.max && row.intersection < s.max_intersection)) {
      s.max = q;
      s.max_intersection = row.intersection;
    }
    s.range = s.max - s.min;
  }
  std::vector<CapacitySpread> out;
  for (auto& [p, s] : spreads) out.push_back(std::move(s));
  return out;
}

std::string render_report(std::span<const FitRow> fits) {
  std::ostringstream md;
  md << "# Fundamental diagram report\n\n";

  std::set<std::string> ids;
  for (const auto& row : fits) ids.insert(row.intersection);
  const auto flagged = std::count_if(fits.begin(), fits.end(), [](const FitRow& r) { return r.flag != "ok"; });
  md << "Fits: " << fits.size() << " cells over " << ids.size() << " intersections, " << flagged
     << " flagged.\n\n";
  md << "Each cell is one least-squares parabola Q = a k^2 + b k + c over the pooled window samples of all "
        "seeds and densities of that (intersection, penetration) pair; n is the number of pooled samples. "
        "k_crit and q_max are the parabola vertex.\n\n";
  md << "Human drivers and RVs share a single first-come-first-served entrance queue and every entrance "
        "decision passes the same conflict arbiter. Humans additionally wait a critical gap after a "
        "conflicting movement clears. This is one reading of how human traffic interacts with the RV "
        "coordination, not a measured behaviour.\n\n";

  md << "## Fits\n\n";
  md << "| intersection | penetration | a | b | c | r^2 | k_crit (veh/km) | q_max (veh/h) | n | flag |\n";
  md << "|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& row : fits) {
    md << "| " << row.intersection << " | " << percent(row.penetration) << " | " << cell(row.a, 5) << " | "
       << cell(row.b, 3) << " | " << cell(row.c, 1) << " | " << cell(row.r_squared, 3) << " | "
       << cell(row.k_crit, 1) << " | " << cell(row.q_max, 1) << " | " << row.n_points << " | " << row.flag
       << " |\n";
  }

  md << "\n## Capacity against penetration\n\n";
  md << "| intersection | q_max by penetration (veh/h) | k_crit by penetration (veh/km) | trend |\n";
  md << "|---|---|---|---|\n";
  for (const auto& t : trend_table(fits)) {
    std::string q, k;
    for (const auto& p : t.points) {
      q += (q.empty() ? "" : ", ") + percent(p.penetration) + ": " + fixed(p.q_max, 1);
      k += (k.empty() ? "" : ", ") + percent(p.penetration) + ": " + fixed(p.k_crit, 1);
    }
    std::string trend = t.monotone ? to_string(*t.monotone) : "incomplete";
    if (!t.missing.empty()) {
      trend += " (missing";
      for (const double p : t.missing) trend += " " + percent(p);
      trend += ")";
    }
    md << "| " << t.intersection << " | " << (q.empty() ? "-" : q) << " | " << (k.empty() ? "-" : k) << " | "
       << trend << " |\n";
  }

  md << "\n## Variability across intersections\n\n";
  md << "| penetration | intersections | min q_max | max q_max | range |\n";
  md << "|---|---|---|---|---|\n";
  for (const auto& s : variability_summary(fits)) {
    md << "| " << percent(s.penetration) << " | " << s.intersections << " | " << fixed(s.min, 1) << " ("
       << s.min_intersection << ") | " << fixed(s.max, 1) << " (" << s.max_intersection << ") | "
       << fixed(s.range, 1) << " |\n";
  }
  return md.str();
}

}  // namespace mixfd
