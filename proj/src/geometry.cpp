#include "mixfd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "mixfd/errors.hpp"
#include "mixfd/rng.hpp"

namespace mixfd {

namespace {

// Legs are numbered counterclockwise: 0 south, 1 east, 2 north, 3 west.
// Traffic keeps right, so from leg L the right turn exits on L+1, the
// through movement on L+2 and the left turn on L+3.
constexpr std::size_t kLegs = 4;

std::size_t exit_leg(std::size_t entry_leg, Turn turn) {
  switch (turn) {
    case Turn::through: return (entry_leg + 2) % kLegs;
    case Turn::right: return (entry_leg + 1) % kLegs;
    case Turn::left: return (entry_leg + 3) % kLegs;
  }
  return entry_leg;
}

std::vector<std::size_t> approach_legs(IntersectionKind kind) {
  if (kind == IntersectionKind::tjunction) return {0, 1, 3};  // north leg missing
  return {0, 1, 2, 3};
}

// Position of a lane end on the boundary of the junction box, counted
// counterclockwise. Along each leg edge come the outbound lanes curb-first,
// then the inbound lanes inner-first.
std::size_t boundary_slot(std::size_t leg, bool outbound, std::size_t lane, std::size_t lanes) {
  const std::size_t slot = outbound ? lane : 2 * lanes - 1 - lane;
  return leg * 2 * lanes + slot;
}

// True when b lies strictly inside the counterclockwise arc from a to c.
bool strictly_between(std::size_t a, std::size_t b, std::size_t c) {
  if (a < c) return a < b && b < c;
  return b > a || b < c;
}

struct PathEnds {
  std::size_t entry;
  std::size_t exit;
};

// Two paths that stay inside the box cross exactly when their end slots
// interleave around the boundary; sharing an exit lane is a merge.
bool paths_conflict(const PathEnds& p, const PathEnds& q) {
  if (p.entry == q.entry) return false;  // diverging from one lane
  if (p.exit == q.exit) return true;
  const bool q_entry_inside = strictly_between(p.entry, q.entry, p.exit);
  const bool q_exit_inside = strictly_between(p.entry, q.exit, p.exit);
  return q_entry_inside != q_exit_inside;
}

}  // namespace

std::string_view to_string(Turn turn) {
  switch (turn) {
    case Turn::through: return "through";
    case Turn::left: return "left";
    case Turn::right: return "right";
  }
  return "?";
}

std::string to_string(MovementId movement) {
  return std::string(to_string(movement.turn)) + "@" + std::to_string(movement.approach);
}

std::string_view to_string(IntersectionKind kind) {
  switch (kind) {
    case IntersectionKind::fourway_1lane: return "fourway_1lane";
    case IntersectionKind::fourway_2lane: return "fourway_2lane";
    case IntersectionKind::tjunction: return "tjunction";
    case IntersectionKind::fourway_asym: return "fourway_asym";
  }
  return "?";
}

std::string_view intersection_label(IntersectionKind kind) {
  switch (kind) {
    case IntersectionKind::fourway_1lane: return "229";
    case IntersectionKind::fourway_2lane: return "332";
    case IntersectionKind::tjunction: return "334";
    case IntersectionKind::fourway_asym: return "499";
  }
  return "?";
}

std::optional<IntersectionKind> parse_intersection_kind(std::string_view text) {
  for (const auto kind : kAllIntersectionKinds) {
    if (text == to_string(kind) || text == intersection_label(kind)) return kind;
  }
  return std::nullopt;
}

std::optional<std::size_t> IntersectionSpec::index_of(MovementId movement) const {
  const auto it = std::find(movements.begin(), movements.end(), movement);
  if (it == movements.end()) return std::nullopt;
  return static_cast<std::size_t>(it - movements.begin());
}

IntersectionSpec build_intersection(IntersectionKind kind, const GeometryOptions& options) {
  IntersectionSpec spec;
  spec.kind = kind;
  spec.id = std::string(intersection_label(kind));
  spec.entrance_zone_length = options.entrance_zone_length;
  spec.speed_limit = options.speed_limit;

  const auto legs = approach_legs(kind);
  const std::size_t lanes = kind == IntersectionKind::fourway_2lane ? 2 : 1;
  const double margin =
      kind == IntersectionKind::fourway_asym ? options.corner_margin + 3.0 : options.corner_margin;
  const double half_width = static_cast<double>(lanes) * options.lane_width + margin;

  spec.approaches = legs.size();
  spec.lanes_per_approach.assign(legs.size(), lanes);
  if (kind == IntersectionKind::fourway_asym) {
    constexpr double kScale[] = {1.0, 0.6, 1.4, 0.8};
    for (const double s : kScale) spec.approach_length.push_back(s * options.approach_length);
  } else {
    spec.approach_length.assign(legs.size(), options.approach_length);
  }

  std::vector<PathEnds> ends;
  for (std::size_t a = 0; a < legs.size(); ++a) {
    for (const Turn turn : {Turn::through, Turn::left, Turn::right}) {
      const std::size_t out_leg = exit_leg(legs[a], turn);
      if (std::find(legs.begin(), legs.end(), out_leg) == legs.end()) continue;
      // With two lanes the inner lane is a dedicated left-turn lane.
      const std::size_t lane = (lanes > 1 && turn == Turn::left) ? lanes - 1 : 0;
      const double offset = (static_cast<double>(lanes) - 0.5 - static_cast<double>(lane)) *
                            options.lane_width;
      double length = 0.0;
      switch (turn) {
        case Turn::through: length = 2.0 * half_width; break;
        case Turn::right: length = std::numbers::pi / 2.0 * (half_width - offset); break;
        case Turn::left: length = std::numbers::pi / 2.0 * (half_width + offset); break;
      }
      spec.movements.push_back({static_cast<std::uint8_t>(a), turn});
      spec.movement_lane.push_back(lane);
      spec.conflict_zone_path_length.push_back(length);
      ends.push_back({boundary_slot(legs[a], false, lane, lanes),
                      boundary_slot(out_leg, true, lane, lanes)});
    }
  }

  const std::size_t n = spec.movements.size();
  spec.conflict.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && paths_conflict(ends[i], ends[j])) spec.conflict[i * n + j] = 1;
    }
  }
  validate(spec);
  return spec;
}

void validate(const IntersectionSpec& spec) {
  const std::size_t n = spec.movements.size();
  if (spec.approaches < 3 || spec.approaches > 4)
    throw ConfigError("intersection " + spec.id + ": approaches must be 3 or 4");
  if (spec.lanes_per_approach.size() != spec.approaches ||
      spec.approach_length.size() != spec.approaches)
    throw ConfigError("intersection " + spec.id + ": per-approach arrays have wrong size");
  if (spec.movement_lane.size() != n || spec.conflict_zone_path_length.size() != n ||
      spec.conflict.size() != n * n)
    throw ConfigError("intersection " + spec.id + ": per-movement arrays have wrong size");
  if (!(spec.entrance_zone_length > 0.0) || !(spec.speed_limit > 0.0))
    throw ConfigError("intersection " + spec.id + ": lengths and speed limit must be positive");
  for (std::size_t a = 0; a < spec.approaches; ++a) {
    if (!(spec.approach_length[a] > 0.0) || spec.lanes_per_approach[a] == 0)
      throw ConfigError("intersection " + spec.id + ": approach " + std::to_string(a) +
                        " needs positive length and at least one lane");
    if (spec.approach_length[a] < spec.entrance_zone_length)
      throw ConfigError("intersection " + spec.id + ": entrance zone longer than approach " +
                        std::to_string(a));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = spec.movements[i];
    if (m.approach >= spec.approaches)
      throw ConfigError("intersection " + spec.id + ": movement " + to_string(m) +
                        " references a missing approach");
    if (spec.movement_lane[i] >= spec.lanes_per_approach[m.approach])
      throw ConfigError("intersection " + spec.id + ": movement " + to_string(m) +
                        " uses a missing lane");
    if (!(spec.conflict_zone_path_length[i] > 0.0))
      throw ConfigError("intersection " + spec.id + ": conflict-zone path of " + to_string(m) +
                        " must be positive");
    if (spec.conflicts(i, i))
      throw ConfigError("intersection " + spec.id + ": movement conflicts with itself");
    for (std::size_t j = 0; j < i; ++j) {
      if (spec.conflicts(i, j) != spec.conflicts(j, i))
        throw ConfigError("intersection " + spec.id + ": conflict matrix not symmetric");
    }
  }
  if (spec.approaches == 4) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& m = spec.movements[i];
      if (m.turn != Turn::left) continue;
      const auto opposing = spec.index_of({static_cast<std::uint8_t>((m.approach + 2) % 4), Turn::through});
      if (opposing && !spec.conflicts(i, *opposing))
        throw ConfigError("intersection " + spec.id + ": " + to_string(m) +
                          " must conflict with the opposing through movement");
    }
  }
}

bool conflicting(const IntersectionSpec& spec, MovementId first, MovementId second) {
  const auto i = spec.index_of(first);
  const auto j = spec.index_of(second);
  if (!i) throw InputError("unknown movement " + to_string(first) + " in intersection " + spec.id);
  if (!j) throw InputError("unknown movement " + to_string(second) + " in intersection " + spec.id);
  return spec.conflicts(*i, *j);
}

std::vector<Ring> build_rings(const IntersectionSpec& spec, const NetworkOptions& options) {
  if (!(options.min_spacing > 0.0)) throw ConfigError("min_spacing must be positive");
  if (options.return_length < 0.0) throw ConfigError("return_length must be non-negative");
  std::vector<Ring> rings;
  for (std::size_t a = 0; a < spec.approaches; ++a) {
    for (std::size_t lane = 0; lane < spec.lanes_per_approach[a]; ++lane) {
      Ring ring;
      ring.approach = a;
      ring.lane = lane;
      double longest_path = 0.0;
      for (std::size_t m = 0; m < spec.movements.size(); ++m) {
        if (spec.movements[m].approach == a && spec.movement_lane[m] == lane) {
          ring.movements.push_back(m);
          longest_path = std::max(longest_path, spec.conflict_zone_path_length[m]);
        }
      }
      if (ring.movements.empty()) continue;
      // The arc outside the conflict zone is rounded up to whole queue slots,
      // so a ring at jam capacity holds every standing gap at exactly s0.
      const double outside = spec.approach_length[a] + options.return_length;
      ring.jam_capacity = static_cast<std::size_t>(std::ceil(outside / options.min_spacing - 1e-9));
      ring.entrance_position = spec.approach_length[a];
      ring.conflict_zone_end = ring.entrance_position + longest_path;
      ring.length = static_cast<double>(ring.jam_capacity) * options.min_spacing + longest_path;
      rings.push_back(std::move(ring));
    }
  }
  return rings;
}

std::size_t jam_capacity(const IntersectionSpec& spec, const NetworkOptions& options) {
  std::size_t total = 0;
  for (const auto& ring : build_rings(spec, options)) total += ring.jam_capacity;
  return total;
}

std::size_t ClosedNetwork::jam_capacity() const {
  std::size_t total = 0;
  for (const auto& ring : rings) total += ring.jam_capacity;
  return total;
}

double ClosedNetwork::total_length() const {
  double total = 0.0;
  for (const auto& ring : rings) total += ring.length;
  return total;
}

std::vector<double> ClosedNetwork::circuit_length_per_route() const {
  std::vector<double> lengths(intersection.movements.size(), 0.0);
  for (const auto& ring : rings) {
    for (const auto m : ring.movements) lengths[m] = ring.length;
  }
  return lengths;
}

ClosedNetwork build_closed_network(const IntersectionSpec& spec, std::size_t vehicle_count,
                                   const NetworkOptions& options) {
  ClosedNetwork net;
  net.intersection = spec;
  net.min_spacing = options.min_spacing;
  net.rings = build_rings(spec, options);
  const std::size_t capacity = net.jam_capacity();
  if (vehicle_count > capacity)
    throw ConfigError("vehicle_count " + std::to_string(vehicle_count) +
                      " exceeds jam capacity " + std::to_string(capacity) + " of intersection " +
                      spec.id);

  // Largest-remainder split proportional to ring capacity; quotas never
  // exceed a ring's own capacity.
  const std::size_t rings = net.rings.size();
  std::vector<std::size_t> share(rings, 0);
  std::vector<std::size_t> remainder(rings, 0);
  std::size_t assigned = 0;
  for (std::size_t r = 0; r < rings; ++r) {
    const std::size_t scaled = vehicle_count * net.rings[r].jam_capacity;
    share[r] = scaled / capacity;
    remainder[r] = scaled % capacity;
    assigned += share[r];
  }
  std::vector<std::size_t> order(rings);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return remainder[x] > remainder[y]; });
  for (std::size_t i = 0; assigned < vehicle_count; ++i, ++assigned) ++share[order[i % rings]];

  Rng rng(options.seed);
  net.ring_members.resize(rings);
  for (std::size_t r = 0; r < rings; ++r) {
    const Ring& ring = net.rings[r];
    if (share[r] == 0) continue;
    const double outside = ring.length - (ring.conflict_zone_end - ring.entrance_position);
    const double spacing = outside / static_cast<double>(share[r]);
    for (std::size_t j = 0; j < share[r]; ++j) {
      double position = ring.conflict_zone_end + static_cast<double>(j) * spacing;
      if (position >= ring.length) position -= ring.length;
      const std::size_t id = net.vehicle_ring.size();
      net.vehicle_ring.push_back(r);
      net.initial_position.push_back(position);
      std::vector<std::size_t> route = ring.movements;
      std::rotate(route.begin(), route.begin() + static_cast<std::ptrdiff_t>(uniform_index(rng, route.size())),
                  route.end());
      net.routes.push_back(std::move(route));
      net.ring_members[r].push_back(id);
    }
  }
  return net;
}

}  // namespace mixfd
