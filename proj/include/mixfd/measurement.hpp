#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mixfd/dynamics.hpp"
#include "mixfd/geometry.hpp"

namespace mixfd {

enum class DetectorRegion : std::uint8_t {
  intersection,  // every ring from the start of its approach to the end of its conflict zone
  full_circuit,  // every ring end to end
  custom,        // [segment_start, segment_end) on every ring
};

struct DetectorConfig {
  DetectorRegion region = DetectorRegion::intersection;
  double segment_start = 0.0;
  double segment_end = 0.0;
  double window = 60.0;
  double warmup = 120.0;
};

void validate(const DetectorConfig& detector);

/// Half-open stretch [start, end) of one ring.
struct Segment {
  std::size_t ring = 0;
  double start = 0.0;
  double end = 0.0;
};

/// Resolves the detector region against a concrete network. Custom segments
/// are clipped to each ring's length.
std::vector<Segment> detector_segments(const ClosedNetwork& network, const DetectorConfig& detector);

/// Positions and speeds of every vehicle at every recorded time.
struct Trace {
  std::vector<double> ring_length;
  std::vector<std::size_t> vehicle_ring;
  std::vector<double> times;
  std::vector<double> positions;  // frame-major: positions[frame * vehicles + id]
  std::vector<double> speeds;

  std::size_t vehicle_count() const { return vehicle_ring.size(); }
  std::size_t frame_count() const { return times.size(); }
  std::span<const double> frame_positions(std::size_t frame) const {
    return {positions.data() + frame * vehicle_count(), vehicle_count()};
  }
};

/// Empty trace bound to the world's network layout.
Trace make_trace(const WorldState& world);
void record(Trace& trace, const WorldState& world);

/// Edie-style aggregate over one space-time window.
///
/// With total distance D and total time T spent in a region of length L over
/// a window of W seconds: k = T/(L W), Q = D/(L W), V = D/T, reported in
/// veh/km, veh/h and km/h, so Q = k V holds identically.
struct FlowSample {
  double k = 0.0;
  double q = 0.0;
  double v = 0.0;
  double window_start = 0.0;
  double total_travel_distance = 0.0;
  double total_travel_time = 0.0;
};

/// Positions are interpolated linearly between frames, so boundary
/// crossings and window edges inside a step are resolved exactly.
FlowSample measure_window(const Trace& trace, std::span<const Segment> segments, double window_start,
                          double window_end);

/// One sample per complete window after warmup; a trailing partial window is dropped.
std::vector<FlowSample> measure_run(const Trace& trace, std::span<const Segment> segments,
                                    const DetectorConfig& detector);

}  // namespace mixfd
