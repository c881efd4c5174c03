#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixfd/fdfit.hpp"

namespace mixfd {

/// One penetration curve of a fundamental-diagram panel.
struct PlotSeries {
  double penetration = 0.0;
  std::vector<FlowPoint> points;
  std::optional<QuadraticFit> fit;  // drawn only when present
};

/// The series of one intersection, in penetration order.
std::vector<PlotSeries> plot_series(const std::map<CellKey, CellFit>& table, const std::string& intersection);

/// Standalone SVG: scatter of each series plus its fitted parabola, with a
/// penetration legend and labelled density/flow axes.
std::string render_fd_svg(const std::string& intersection, std::span<const PlotSeries> series);

}  // namespace mixfd
