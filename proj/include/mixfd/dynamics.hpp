#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "mixfd/coordination.hpp"
#include "mixfd/geometry.hpp"

namespace mixfd {

enum class Phase : std::uint8_t { approaching, waiting_at_entrance, inside_conflict_zone, clearing };

/// Intelligent Driver Model parameters shared by both vehicle classes.
struct IdmParams {
  double max_accel = 1.5;
  double comfortable_decel = 2.0;
  // Hard physical bound on braking.
  double max_decel = 9.0;
  double standstill_gap = 2.0;
  double time_headway = 1.5;
  double exponent = 4.0;
  double desired_speed = 13.89;
  double vehicle_length = 5.0;
};

/// Throws ConfigError unless every parameter is physically meaningful.
void validate(const IdmParams& params);

inline constexpr double kInfiniteGap = std::numeric_limits<double>::infinity();

/// Clamped IDM acceleration for a follower `gap` metres behind its leader's
/// rear bumper. Pass kInfiniteGap for a free road.
double car_following_accel(double speed, double gap, double leader_speed, const IdmParams& params);

struct VehicleState {
  std::size_t id = 0;
  VehicleClass vehicle_class = VehicleClass::human;
  double position = 0.0;  // front bumper, metres along the ring
  double speed = 0.0;
  double accel = 0.0;
  double length = 5.0;
  std::size_t movement = 0;  // movement of the current lap
  Phase phase = Phase::approaching;
  std::size_t lap = 0;
  double arrival_time = 0.0;  // when the vehicle last became waiting_at_entrance
};

struct WorldState {
  double time = 0.0;
  std::vector<VehicleState> vehicles;  // vehicles[i].id == i
  std::shared_ptr<const ClosedNetwork> network;
  std::uint64_t rng_seed = 0;
  // Per movement, when a vehicle last left the conflict zone (-inf if never).
  std::vector<double> last_release;
};

/// Places the network's vehicles at rest with the given classes.
WorldState make_world(std::shared_ptr<const ClosedNetwork> network,
                      std::span<const VehicleClass> classes, const IdmParams& params,
                      std::uint64_t rng_seed = 0);

/// Bumper-to-bumper gap from `vehicle` to its leader in the same ring.
double gap_to_leader(const WorldState& world, std::size_t vehicle);

/// Smallest bumper-to-bumper gap in the world (infinite with no followers).
double min_gap(const WorldState& world);

/// Movements currently held by vehicles inside the conflict zone.
std::vector<std::size_t> occupancy(const WorldState& world);

/// Advances the world by dt. `decisions` must hold a grant for every vehicle
/// waiting at an entrance. Throws SimulationFault when a gap turns negative,
/// a vehicle runs an entrance line without a grant, or two conflicting
/// movements end up inside the conflict zone together.
WorldState step(WorldState world, double dt, std::span<const Grant> decisions, const IdmParams& params);

}  // namespace mixfd
