#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mixfd {

enum class Turn : std::uint8_t { through, left, right };

std::string_view to_string(Turn turn);

/// One movement through the junction: which approach it enters from and where it turns.
struct MovementId {
  std::uint8_t approach = 0;
  Turn turn = Turn::through;

  auto operator<=>(const MovementId&) const = default;
};

std::string to_string(MovementId movement);

enum class IntersectionKind : std::uint8_t { fourway_1lane, fourway_2lane, tjunction, fourway_asym };

std::string_view to_string(IntersectionKind kind);
/// Accepts the archetype name ("fourway_1lane", ...) or its label ("229", ...).
std::optional<IntersectionKind> parse_intersection_kind(std::string_view text);
/// Identifier used in output files.
std::string_view intersection_label(IntersectionKind kind);

inline constexpr IntersectionKind kAllIntersectionKinds[] = {
    IntersectionKind::fourway_1lane, IntersectionKind::fourway_2lane,
    IntersectionKind::tjunction, IntersectionKind::fourway_asym};

/// Overridable dimensions shared by all archetypes.
struct GeometryOptions {
  double approach_length = 200.0;
  double entrance_zone_length = 30.0;
  double speed_limit = 13.89;
  double lane_width = 3.5;
  // Setback from the lane edges to where paths enter the junction box.
  double corner_margin = 4.0;
};

/// Static description of an unsignalized intersection.
///
/// Movements are stored in a fixed order; everything per-movement (lane,
/// path length, conflict row) is indexed by position in `movements`.
struct IntersectionSpec {
  std::string id;
  IntersectionKind kind = IntersectionKind::fourway_1lane;
  std::size_t approaches = 0;
  std::vector<std::size_t> lanes_per_approach;
  std::vector<MovementId> movements;
  // Lane (0 = curb) each movement uses on its approach.
  std::vector<std::size_t> movement_lane;
  // Row-major movement x movement; nonzero means the two paths cross or merge.
  std::vector<std::uint8_t> conflict;
  double entrance_zone_length = 0.0;
  std::vector<double> conflict_zone_path_length;
  std::vector<double> approach_length;
  double speed_limit = 0.0;

  std::size_t movement_count() const { return movements.size(); }
  std::optional<std::size_t> index_of(MovementId movement) const;
  bool conflicts(std::size_t first, std::size_t second) const {
    return conflict[first * movements.size() + second] != 0;
  }
};

IntersectionSpec build_intersection(IntersectionKind kind, const GeometryOptions& options = {});

/// Throws ConfigError when any structural invariant of `spec` is broken.
void validate(const IntersectionSpec& spec);

/// Throws InputError if either movement is not part of `spec`.
bool conflicting(const IntersectionSpec& spec, MovementId first, MovementId second);

struct NetworkOptions {
  // Front-to-front distance of a standing queue: vehicle length plus standstill gap.
  double min_spacing = 7.0;
  double return_length = 300.0;
  std::uint64_t seed = 0;
};

/// One single-lane circuit: approach lane, its conflict-zone paths, and the
/// return path that feeds the vehicle back to the start of the same lane.
///
/// Positions run from 0 at the upstream end of the approach. The entrance
/// line sits at `entrance_position`; every movement of the lane leaves the
/// conflict zone by `conflict_zone_end`.
struct Ring {
  std::size_t approach = 0;
  std::size_t lane = 0;
  std::vector<std::size_t> movements;
  double length = 0.0;
  double entrance_position = 0.0;
  double conflict_zone_end = 0.0;
  // Vehicles that fit outside the conflict zone at minimum spacing.
  std::size_t jam_capacity = 0;
};

/// Closed system of rings with a fixed vehicle population.
struct ClosedNetwork {
  IntersectionSpec intersection;
  std::vector<Ring> rings;
  double min_spacing = 0.0;
  std::vector<std::size_t> vehicle_ring;
  std::vector<double> initial_position;
  // Movement cycle each vehicle follows lap after lap.
  std::vector<std::vector<std::size_t>> routes;
  // Per ring, vehicle ids in driving order: element i+1 is ahead of element i.
  std::vector<std::vector<std::size_t>> ring_members;

  std::size_t vehicle_count() const { return vehicle_ring.size(); }
  std::size_t jam_capacity() const;
  double total_length() const;
  /// Circuit length of every movement's route, indexed like spec.movements.
  std::vector<double> circuit_length_per_route() const;
};

/// Ring layout without vehicles; shared by capacity queries and network construction.
std::vector<Ring> build_rings(const IntersectionSpec& spec, const NetworkOptions& options = {});

std::size_t jam_capacity(const IntersectionSpec& spec, const NetworkOptions& options = {});

/// Distributes `vehicle_count` vehicles over the rings and places them evenly
/// outside the conflict zones. Throws ConfigError above jam capacity.
ClosedNetwork build_closed_network(const IntersectionSpec& spec, std::size_t vehicle_count,
                                   const NetworkOptions& options = {});

}  // namespace mixfd
