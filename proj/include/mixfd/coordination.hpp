#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mixfd/geometry.hpp"

namespace mixfd {

enum class VehicleClass : std::uint8_t { human, rv };
enum class Decision : std::uint8_t { stop, go };

/// A vehicle queued at an entrance line, ordered first-come-first-served.
struct Claim {
  std::size_t vehicle = 0;
  std::size_t movement = 0;  // index into IntersectionSpec::movements
  double arrival_time = 0.0;
};

/// What a vehicle at the head of its entrance queue can see.
struct EntranceObservation {
  std::size_t vehicle = 0;
  VehicleClass vehicle_class = VehicleClass::human;
  std::size_t movement = 0;
  double arrival_time = 0.0;
  double wait_time = 0.0;
  // Movements held by vehicles in phase inside_conflict_zone.
  std::vector<std::size_t> occupancy;
  // Every claim waiting at any entrance, this vehicle's own included.
  std::vector<Claim> queued_claims;
  // Time of the observation and, per movement, when a vehicle last left the
  // conflict zone on it. Empty `last_release` means nothing has left yet.
  double now = 0.0;
  std::vector<double> last_release;
};

struct Proposal {
  std::size_t vehicle = 0;
  std::size_t movement = 0;
  double arrival_time = 0.0;
  Decision decision = Decision::stop;
};

struct Grant {
  std::size_t vehicle = 0;
  Decision decision = Decision::stop;
  double issue_time = 0.0;
};

struct HumanGapParams {
  // Time a conflicting movement must have been clear before a human accepts the gap.
  double critical_gap = 2.0;
};

/// Rule-based stop/go for robot vehicles: go when no occupied movement and no
/// strictly earlier queued claim conflicts with ours.
Decision rv_policy(const EntranceObservation& obs, const IntersectionSpec& spec);

/// First-come-first-served gap acceptance for human drivers. Same priority
/// queue as the RVs, plus the conflicting movements must have been released
/// at least `critical_gap` seconds ago.
Decision human_right_of_way(const EntranceObservation& obs, const IntersectionSpec& spec,
                            const HumanGapParams& params = {});

/// Fail-safe arbiter. Go-proposals are considered in (arrival_time, vehicle)
/// order and granted greedily when they conflict neither with `occupancy` nor
/// with an earlier grant; stop proposals always stay stop. The result has one
/// grant per proposal, in input order.
std::vector<Grant> failsafe_arbitrate(std::span<const Proposal> proposals,
                                      const IntersectionSpec& spec,
                                      std::span<const std::size_t> occupancy,
                                      double issue_time = 0.0);

}  // namespace mixfd
