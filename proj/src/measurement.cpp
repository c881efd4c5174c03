#include "mixfd/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mixfd/errors.hpp"

namespace mixfd {

namespace {

constexpr double kMetresPerKm = 1000.0;
constexpr double kSecondsPerHour = 3600.0;

struct Totals {
  double distance = 0.0;
  double time = 0.0;
};

// Adds the part of the straight run [from, to] (unwrapped, from in [0, L))
// lying inside `segment` and the time spent there, given the run lasts `duration`.
void accumulate(Totals& totals, double from, double to, double duration, const Segment& segment,
                double ring_length) {
  if (to == from) {
    if (from >= segment.start && from < segment.end) totals.time += duration;
    return;
  }
  double inside = 0.0;
  for (const double shift : {0.0, ring_length}) {
    const double lo = std::max(from, segment.start + shift);
    const double hi = std::min(to, segment.end + shift);
    if (hi > lo) inside += hi - lo;
  }
  totals.distance += inside;
  totals.time += inside / (to - from) * duration;
}

double region_length(std::span<const Segment> segments, const Trace& trace) {
  double length = 0.0;
  for (const auto& s : segments) {
    if (s.ring >= trace.ring_length.size() || !(s.start >= 0.0) || !(s.end > s.start) ||
        s.end > trace.ring_length[s.ring])
      throw InputError("detector segment [" + std::to_string(s.start) + ", " + std::to_string(s.end) +
                       ") does not fit ring " + std::to_string(s.ring));
    length += s.end - s.start;
  }
  if (!(length > 0.0)) throw InputError("detector region is empty");
  return length;
}

std::vector<std::vector<Segment>> segments_by_ring(std::span<const Segment> segments, std::size_t rings) {
  std::vector<std::vector<Segment>> by_ring(rings);
  for (const auto& s : segments) by_ring[s.ring].push_back(s);
  return by_ring;
}

FlowSample window_sample(const Trace& trace, const std::vector<std::vector<Segment>>& by_ring,
                         double length, double window_start, double window_end) {
  Totals totals;
  const std::size_t n = trace.vehicle_count();
  const auto first = std::upper_bound(trace.times.begin(), trace.times.end(), window_start);
  std::size_t frame = first == trace.times.begin() ? 0 : static_cast<std::size_t>(first - trace.times.begin()) - 1;
  for (; frame + 1 < trace.frame_count() && trace.times[frame] < window_end; ++frame) {
    const double t0 = trace.times[frame];
    const double t1 = trace.times[frame + 1];
    const double lo = std::max(t0, window_start);
    const double hi = std::min(t1, window_end);
    if (!(hi > lo)) continue;
    const auto before = trace.frame_positions(frame);
    const auto after = trace.frame_positions(frame + 1);
    for (std::size_t id = 0; id < n; ++id) {
      const auto& segs = by_ring[trace.vehicle_ring[id]];
      if (segs.empty()) continue;
      const double ring_length = trace.ring_length[trace.vehicle_ring[id]];
      double moved = after[id] - before[id];
      if (moved < 0.0) moved += ring_length;
      const double from = before[id] + moved * (lo - t0) / (t1 - t0);
      const double to = before[id] + moved * (hi - t0) / (t1 - t0);
      for (const auto& s : segs) accumulate(totals, from, to, hi - lo, s, ring_length);
    }
  }

  const double area = length * (window_end - window_start);
  FlowSample sample;
  sample.window_start = window_start;
  sample.total_travel_distance = totals.distance;
  sample.total_travel_time = totals.time;
  sample.k = totals.time / area * kMetresPerKm;
  sample.q = totals.distance / area * kSecondsPerHour;
  sample.v = totals.time > 0.0 ? totals.distance / totals.time * (kSecondsPerHour / kMetresPerKm) : 0.0;
  return sample;
}

}  // namespace

void validate(const DetectorConfig& d) {
  if (!(d.window > 0.0)) throw ConfigError("detector window must be positive");
  if (!(d.warmup >= 0.0)) throw ConfigError("detector warmup must be non-negative");
  if (d.region == DetectorRegion::custom && !(d.segment_end > d.segment_start && d.segment_start >= 0.0))
    throw ConfigError("detector segment_end must exceed segment_start >= 0");
}

std::vector<Segment> detector_segments(const ClosedNetwork& network, const DetectorConfig& detector) {
  validate(detector);
  std::vector<Segment> segments;
  for (std::size_t r = 0; r < network.rings.size(); ++r) {
    const Ring& ring = network.rings[r];
    switch (detector.region) {
      case DetectorRegion::intersection: segments.push_back({r, 0.0, ring.conflict_zone_end}); break;
      case DetectorRegion::full_circuit: segments.push_back({r, 0.0, ring.length}); break;
      case DetectorRegion::custom: {
        const double end = std::min(detector.segment_end, ring.length);
        if (end > detector.segment_start) segments.push_back({r, detector.segment_start, end});
        break;
      }
    }
  }
  if (segments.empty()) throw ConfigError("detector segment lies beyond every ring");
  return segments;
}

Trace make_trace(const WorldState& world) {
  Trace trace;
  const ClosedNetwork& net = *world.network;
  for (const auto& ring : net.rings) trace.ring_length.push_back(ring.length);
  trace.vehicle_ring = net.vehicle_ring;
  return trace;
}

void record(Trace& trace, const WorldState& world) {
  if (world.vehicles.size() != trace.vehicle_count())
    throw InputError("record: world does not match trace layout");
  if (!trace.times.empty() && !(world.time > trace.times.back()))
    throw InputError("record: frames must be strictly increasing in time");
  trace.times.push_back(world.time);
  for (const auto& v : world.vehicles) {
    trace.positions.push_back(v.position);
    trace.speeds.push_back(v.speed);
  }
}

FlowSample measure_window(const Trace& trace, std::span<const Segment> segments, double window_start,
                          double window_end) {
  if (!(window_end > window_start)) throw InputError("measure_window: empty window duration");
  if (trace.times.empty() || window_start < trace.times.front() || window_end > trace.times.back())
    throw InputError("measure_window: trace does not cover the window");
  const double length = region_length(segments, trace);
  return window_sample(trace, segments_by_ring(segments, trace.ring_length.size()), length, window_start,
                       window_end);
}

std::vector<FlowSample> measure_run(const Trace& trace, std::span<const Segment> segments,
                                    const DetectorConfig& detector) {
  validate(detector);
  if (trace.times.empty()) throw InputError("measure_run: empty trace");
  const double origin = trace.times.front();
  const double duration = trace.times.back() - origin;
  // Frame times accumulate dt, so allow for rounding when counting whole windows.
  const double slack = 1e-9 * std::max(1.0, duration);
  if (duration + slack < detector.warmup + detector.window)
    throw InputError("measure_run: trace of " + std::to_string(duration) +
                     " s is shorter than warmup + one window");
  const auto windows =
      static_cast<std::size_t>(std::floor((duration - detector.warmup + slack) / detector.window));

  const double length = region_length(segments, trace);
  const auto by_ring = segments_by_ring(segments, trace.ring_length.size());
  std::vector<FlowSample> samples;
  samples.reserve(windows);
  for (std::size_t w = 0; w < windows; ++w) {
    const double start = origin + detector.warmup + static_cast<double>(w) * detector.window;
    const double end = std::min(start + detector.window, trace.times.back());
    FlowSample sample = window_sample(trace, by_ring, length, start, end);
    samples.push_back(sample);
  }
  return samples;
}

}  // namespace mixfd
