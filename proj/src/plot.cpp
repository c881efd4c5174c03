#include "mixfd/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace mixfd {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 480;
constexpr double kLeft = 80;
constexpr double kRight = 150;
constexpr double kTop = 40;
constexpr double kBottom = 60;
constexpr std::array<const char*, 6> kColors{"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Smallest 1/2/5 x 10^n step giving at most `ticks` intervals up to `hi`.
double nice_step(double hi, int ticks) {
  const double raw = hi / ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (const double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::vector<PlotSeries> plot_series(const std::map<CellKey, CellFit>& table, const std::string& intersection) {
  std::vector<PlotSeries> out;
  for (const auto& [key, cell] : table) {
    if (key.first != intersection) continue;
    out.push_back({key.second, cell.points, cell.fit});
  }
  return out;
}

std::string render_fd_svg(const std::string& intersection, std::span<const PlotSeries> series) {
  double k_hi = 0.0;
  double q_hi = 0.0;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      k_hi = std::max(k_hi, p.k);
      q_hi = std::max(q_hi, p.q);
    }
  }
  if (!(k_hi > 0.0)) k_hi = 1.0;
  if (!(q_hi > 0.0)) q_hi = 1.0;
  const double k_step = nice_step(k_hi, 8);
  const double q_step = nice_step(q_hi * 1.05, 8);
  k_hi = std::ceil(k_hi / k_step) * k_step;
  q_hi = std::ceil(q_hi * 1.05 / q_step) * q_step;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto x = [&](double k) { return kLeft + k / k_hi * pw; };
  auto y = [&](double q) { return kTop + (1.0 - q / q_hi) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<defs><clipPath id=\"area\"><rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw
      << "\" height=\"" << ph << "\"/></clipPath></defs>\n";
  svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">Intersection "
      << intersection << "</text>\n";

  svg << "<g stroke=\"#dddddd\">\n";
  for (double k = 0.0; k <= k_hi + 1e-9; k += k_step)
    svg << "<line x1=\"" << num(x(k)) << "\" y1=\"" << kTop << "\" x2=\"" << num(x(k)) << "\" y2=\"" << kTop + ph
        << "\"/>\n";
  for (double q = 0.0; q <= q_hi + 1e-9; q += q_step)
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << num(y(q)) << "\" x2=\"" << kLeft + pw << "\" y2=\"" << num(y(q))
        << "\"/>\n";
  svg << "</g>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<g text-anchor=\"middle\">\n";
  for (double k = 0.0; k <= k_hi + 1e-9; k += k_step)
    svg << "<text x=\"" << num(x(k)) << "\" y=\"" << kTop + ph + 16 << "\">" << label(k) << "</text>\n";
  svg << "</g>\n<g text-anchor=\"end\">\n";
  for (double q = 0.0; q <= q_hi + 1e-9; q += q_step)
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(y(q) + 4) << "\">" << label(q) << "</text>\n";
  svg << "</g>\n";
  svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << kHeight - 16
      << "\" text-anchor=\"middle\">Density k (veh/km)</text>\n";
  svg << "<text transform=\"translate(22 " << num(kTop + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">Flow Q (veh/h)</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kColors[i % kColors.size()];
    svg << "<g fill=\"" << color << "\" fill-opacity=\"0.55\" clip-path=\"url(#area)\">\n";
    for (const auto& p : s.points)
      svg << "<circle cx=\"" << num(x(p.k)) << "\" cy=\"" << num(y(p.q)) << "\" r=\"2.5\"/>\n";
    svg << "</g>\n";
    if (s.fit && !s.points.empty()) {
      const auto [lo, hi] = std::minmax_element(s.points.begin(), s.points.end(),
                                                [](const FlowPoint& a, const FlowPoint& b) { return a.k < b.k; });
      constexpr int kSegments = 120;
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" clip-path=\"url(#area)\" points=\"";
      for (int j = 0; j <= kSegments; ++j) {
        const double k = lo->k + (hi->k - lo->k) * j / kSegments;
        svg << (j ? " " : "") << num(x(k)) << ',' << num(y(s.fit->evaluate(k)));
      }
      svg << "\"/>\n";
    }
    const double ly = kTop + 14 + 22.0 * static_cast<double>(i);
    const double lx = kLeft + pw + 18;
    svg << "<line x1=\"" << lx << "\" y1=\"" << num(ly) << "\" x2=\"" << lx + 24 << "\" y2=\"" << num(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<circle cx=\"" << lx + 12 << "\" cy=\"" << num(ly) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    svg << "<text x=\"" << lx + 32 << "\" y=\"" << num(ly + 4) << "\">" << label(std::round(s.penetration * 1000) / 10)
        << "%" << (s.fit ? "" : " (no fit)") << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace mixfd
