#include "mixfd/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mixfd/errors.hpp"

namespace mixfd {

namespace {

// Vehicles held at an entrance aim to stop this far before the line.
constexpr double kStopMargin = 0.5;
// Inside this distance to the stop target a held vehicle no longer creeps forward.
constexpr double kCreepDistance = 1.0;
constexpr double kGapTolerance = 1e-9;

double ring_gap(const VehicleState& follower, const VehicleState& leader, double ring_length) {
  double ahead = leader.position - follower.position;
  if (ahead < 0.0) ahead += ring_length;
  return ahead - leader.length;
}

// Constant-deceleration profile that brings a held vehicle to rest at the
// stop target. Returns +inf while the vehicle can still approach freely.
double hold_accel(const VehicleState& v, double entrance, const IdmParams& params) {
  const double distance = entrance - kStopMargin - v.position;
  if (distance <= 0.0) return v.speed > 0.0 ? -params.max_decel : 0.0;
  const double required = v.speed * v.speed / (2.0 * distance);
  if (required >= params.comfortable_decel || distance < kCreepDistance)
    return v.speed > 0.0 ? -required : 0.0;
  return kInfiniteGap;
}

void refresh_waiting(WorldState& world) {
  const ClosedNetwork& net = *world.network;
  const double zone = net.intersection.entrance_zone_length;
  for (std::size_t r = 0; r < net.rings.size(); ++r) {
    const Ring& ring = net.rings[r];
    VehicleState* front = nullptr;
    for (const std::size_t id : net.ring_members[r]) {
      VehicleState& v = world.vehicles[id];
      if (v.phase != Phase::approaching && v.phase != Phase::waiting_at_entrance) continue;
      if (v.position < ring.entrance_position - zone || v.position >= ring.entrance_position) continue;
      if (front == nullptr || v.position > front->position) front = &v;
    }
    if (front != nullptr && front->phase == Phase::approaching) {
      front->phase = Phase::waiting_at_entrance;
      front->arrival_time = world.time;
    }
  }
}

}  // namespace

void validate(const IdmParams& p) {
  if (!(p.max_accel > 0.0) || !(p.comfortable_decel > 0.0) || !(p.max_decel >= p.comfortable_decel) ||
      !(p.standstill_gap >= 0.0) || !(p.time_headway >= 0.0) || !(p.exponent > 0.0) ||
      !(p.desired_speed > 0.0) || !(p.vehicle_length > 0.0))
    throw ConfigError(
        "dynamics parameters must be positive, with max_decel >= comfortable_decel");
}

double car_following_accel(double speed, double gap, double leader_speed, const IdmParams& p) {
  if (gap < 0.0) throw std::logic_error("car_following_accel: negative gap " + std::to_string(gap));
  const double free_term = 1.0 - std::pow(speed / p.desired_speed, p.exponent);
  double accel = p.max_accel * free_term;
  if (std::isfinite(gap)) {
    if (gap == 0.0) return speed > 0.0 ? -p.max_decel : std::min(0.0, accel);
    const double dynamic = speed * p.time_headway +
                           speed * (speed - leader_speed) / (2.0 * std::sqrt(p.max_accel * p.comfortable_decel));
    const double desired_gap = p.standstill_gap + std::max(0.0, dynamic);
    const double ratio = desired_gap / gap;
    accel = p.max_accel * (free_term - ratio * ratio);
  }
  return std::clamp(accel, -p.max_decel, p.max_accel);
}

WorldState make_world(std::shared_ptr<const ClosedNetwork> network,
                      std::span<const VehicleClass> classes, const IdmParams& params,
                      std::uint64_t rng_seed) {
  if (!network) throw InputError("make_world: network is null");
  validate(params);
  const ClosedNetwork& net = *network;
  if (classes.size() != net.vehicle_count())
    throw InputError("make_world: " + std::to_string(classes.size()) + " classes for " +
                     std::to_string(net.vehicle_count()) + " vehicles");
  if (params.vehicle_length > net.min_spacing)
    throw ConfigError("vehicle_length exceeds the network's minimum spacing");

  WorldState world;
  world.network = network;
  world.rng_seed = rng_seed;
  world.last_release.assign(net.intersection.movement_count(), -kInfiniteGap);
  world.vehicles.resize(net.vehicle_count());
  for (std::size_t i = 0; i < net.vehicle_count(); ++i) {
    VehicleState& v = world.vehicles[i];
    const Ring& ring = net.rings[net.vehicle_ring[i]];
    v.id = i;
    v.vehicle_class = classes[i];
    v.position = net.initial_position[i];
    v.length = params.vehicle_length;
    v.movement = net.routes[i].front();
    v.phase = v.position >= ring.entrance_position ? Phase::clearing : Phase::approaching;
  }
  refresh_waiting(world);
  return world;
}

double gap_to_leader(const WorldState& world, std::size_t vehicle) {
  const ClosedNetwork& net = *world.network;
  const std::size_t r = net.vehicle_ring.at(vehicle);
  const auto& members = net.ring_members[r];
  if (members.size() < 2) return kInfiniteGap;
  const auto it = std::find(members.begin(), members.end(), vehicle);
  const std::size_t next = (static_cast<std::size_t>(it - members.begin()) + 1) % members.size();
  return ring_gap(world.vehicles[vehicle], world.vehicles[members[next]], net.rings[r].length);
}

double min_gap(const WorldState& world) {
  const ClosedNetwork& net = *world.network;
  double smallest = kInfiniteGap;
  for (std::size_t r = 0; r < net.rings.size(); ++r) {
    const auto& members = net.ring_members[r];
    if (members.size() < 2) continue;
    for (std::size_t slot = 0; slot < members.size(); ++slot) {
      const auto& leader = world.vehicles[members[(slot + 1) % members.size()]];
      smallest = std::min(smallest, ring_gap(world.vehicles[members[slot]], leader, net.rings[r].length));
    }
  }
  return smallest;
}

std::vector<std::size_t> occupancy(const WorldState& world) {
  std::vector<std::size_t> held;
  for (const auto& v : world.vehicles) {
    if (v.phase == Phase::inside_conflict_zone) held.push_back(v.movement);
  }
  std::sort(held.begin(), held.end());
  held.erase(std::unique(held.begin(), held.end()), held.end());
  return held;
}

WorldState step(WorldState world, double dt, std::span<const Grant> decisions, const IdmParams& params) {
  if (!(dt > 0.0)) throw InputError("step: dt must be positive");
  const ClosedNetwork& net = *world.network;
  const IntersectionSpec& spec = net.intersection;
  IdmParams eff = params;
  eff.desired_speed = std::min(params.desired_speed, spec.speed_limit);
  const std::size_t n = world.vehicles.size();

  std::vector<std::int8_t> decided(n, -1);
  for (const Grant& g : decisions) {
    if (g.vehicle >= n) throw InputError("step: grant for unknown vehicle " + std::to_string(g.vehicle));
    decided[g.vehicle] = g.decision == Decision::go ? 1 : 0;
  }
  for (auto& v : world.vehicles) {
    if (v.phase != Phase::waiting_at_entrance) continue;
    if (decided[v.id] < 0)
      throw InputError("step: no entrance decision for waiting vehicle " + std::to_string(v.id));
    if (decided[v.id] == 1) v.phase = Phase::inside_conflict_zone;
  }

  for (std::size_t r = 0; r < net.rings.size(); ++r) {
    const Ring& ring = net.rings[r];
    const auto& members = net.ring_members[r];
    const std::size_t k = members.size();
    for (std::size_t slot = 0; slot < k; ++slot) {
      VehicleState& v = world.vehicles[members[slot]];
      double accel;
      if (k > 1) {
        const VehicleState& leader = world.vehicles[members[(slot + 1) % k]];
        accel = car_following_accel(v.speed, std::max(0.0, ring_gap(v, leader, ring.length)),
                                    leader.speed, eff);
      } else {
        accel = car_following_accel(v.speed, kInfiniteGap, 0.0, eff);
      }
      if (v.phase == Phase::waiting_at_entrance)
        accel = std::min(accel, hold_accel(v, ring.entrance_position, eff));
      v.accel = std::max(accel, -eff.max_decel);
    }
  }

  const double next_time = world.time + dt;
  for (auto& v : world.vehicles) {
    const Ring& ring = net.rings[net.vehicle_ring[v.id]];
    const double start = v.position;
    double speed = v.speed + v.accel * dt;
    double advance;
    if (speed < 0.0) {
      advance = v.accel < 0.0 ? -v.speed * v.speed / (2.0 * v.accel) : 0.0;
      speed = 0.0;
    } else {
      advance = v.speed * dt + 0.5 * v.accel * dt * dt;
    }
    double end = start + std::max(0.0, advance);

    if ((v.phase == Phase::approaching || v.phase == Phase::waiting_at_entrance) &&
        start < ring.entrance_position && end >= ring.entrance_position)
      throw SimulationFault("vehicle " + std::to_string(v.id) + " entered the conflict zone on " +
                                to_string(spec.movements[v.movement]) + " without a grant at t=" +
                                std::to_string(next_time),
                            next_time);
    if (v.phase == Phase::inside_conflict_zone &&
        end - ring.entrance_position >= spec.conflict_zone_path_length[v.movement]) {
      v.phase = Phase::clearing;
      world.last_release[v.movement] = next_time;
    }
    if (end >= ring.length) {
      end -= ring.length;
      if (v.phase == Phase::clearing) {
        v.phase = Phase::approaching;
        ++v.lap;
        const auto& route = net.routes[v.id];
        v.movement = route[v.lap % route.size()];
      }
    }
    v.position = end;
    v.speed = speed;
  }
  world.time = next_time;
  refresh_waiting(world);

  for (std::size_t r = 0; r < net.rings.size(); ++r) {
    const auto& members = net.ring_members[r];
    if (members.size() < 2) continue;
    for (std::size_t slot = 0; slot < members.size(); ++slot) {
      const VehicleState& v = world.vehicles[members[slot]];
      const VehicleState& leader = world.vehicles[members[(slot + 1) % members.size()]];
      if (ring_gap(v, leader, net.rings[r].length) < -kGapTolerance)
        throw SimulationFault("negative gap between vehicle " + std::to_string(v.id) +
                                  " and leader " + std::to_string(leader.id) + " at t=" +
                                  std::to_string(world.time),
                              world.time);
    }
  }

  const auto held = occupancy(world);
  for (std::size_t i = 0; i < held.size(); ++i) {
    for (std::size_t j = i + 1; j < held.size(); ++j) {
      if (spec.conflicts(held[i], held[j]))
        throw SimulationFault("conflicting movements " + to_string(spec.movements[held[i]]) + " and " +
                                  to_string(spec.movements[held[j]]) +
                                  " inside the conflict zone at t=" + std::to_string(world.time),
                              world.time);
    }
  }
  return world;
}

}  // namespace mixfd
