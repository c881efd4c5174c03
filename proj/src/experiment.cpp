#include "mixfd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>
#include <tuple>

#include "mixfd/errors.hpp"
#include "mixfd/rng.hpp"

namespace mixfd {

void validate(const SimulationParams& p) {
  validate(p.idm);
  validate(p.detector);
  if (!(p.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(p.run_duration >= p.detector.warmup + p.detector.window))
    throw ConfigError("run_duration must cover warmup plus one measurement window");
  if (!(p.wait_timeout > 0.0)) throw ConfigError("wait_timeout must be positive");
  if (!(p.human.critical_gap >= 0.0)) throw ConfigError("critical_gap must be non-negative");
  if (!(p.return_length >= 0.0)) throw ConfigError("return_length must be non-negative");
  if (!(p.geometry.approach_length > 0.0) || !(p.geometry.entrance_zone_length > 0.0) ||
      !(p.geometry.speed_limit > 0.0) || !(p.geometry.lane_width > 0.0) || !(p.geometry.corner_margin >= 0.0))
    throw ConfigError("geometry lengths and speed limit must be positive");
}

std::vector<double> default_density_fractions() {
  std::vector<double> fractions;
  constexpr double kLow = 0.05;
  constexpr double kKnee = 0.30;
  constexpr double kHigh = 0.95;
  for (int i = 0; i < 6; ++i) fractions.push_back(kLow * std::pow(kKnee / kLow, i / 5.0));
  for (int i = 1; i <= 6; ++i) fractions.push_back(kKnee + (kHigh - kKnee) * i / 6.0);
  return fractions;
}

std::vector<std::size_t> density_ladder(const ExperimentPlan& plan, const IntersectionSpec& spec) {
  if (!plan.density_levels.empty()) return plan.density_levels;
  const std::size_t capacity = jam_capacity(spec, plan.sim.network_options(0));
  std::vector<std::size_t> counts;
  for (const double f : plan.density_fractions) {
    auto count = static_cast<std::size_t>(std::llround(f * static_cast<double>(capacity)));
    count = std::max<std::size_t>(count, counts.empty() ? 1 : counts.back() + 1);
    counts.push_back(count);
  }
  return counts;
}

void validate(const ExperimentPlan& plan) {
  validate(plan.sim);
  if (plan.intersections.empty() || plan.penetrations.empty() || plan.seeds.empty())
    throw ConfigError("plan needs at least one intersection, penetration and seed");
  if (std::set<IntersectionKind>(plan.intersections.begin(), plan.intersections.end()).size() !=
      plan.intersections.size())
    throw ConfigError("plan intersections must be distinct");
  for (const double p : plan.penetrations) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("penetration " + std::to_string(p) + " outside [0, 1]");
  }
  if (std::set<double>(plan.penetrations.begin(), plan.penetrations.end()).size() != plan.penetrations.size())
    throw ConfigError("plan penetrations must be distinct");
  if (std::set<std::uint64_t>(plan.seeds.begin(), plan.seeds.end()).size() != plan.seeds.size())
    throw ConfigError("plan seeds must be distinct");
  if (plan.density_levels.empty()) {
    if (plan.density_fractions.empty()) throw ConfigError("plan needs at least one density level");
    for (std::size_t i = 0; i < plan.density_fractions.size(); ++i) {
      const double f = plan.density_fractions[i];
      if (!(f > 0.0 && f <= 1.0)) throw ConfigError("density fraction " + std::to_string(f) + " outside (0, 1]");
      if (i > 0 && !(f > plan.density_fractions[i - 1]))
        throw ConfigError("density fractions must be strictly increasing");
    }
  } else {
    for (std::size_t i = 1; i < plan.density_levels.size(); ++i) {
      if (plan.density_levels[i] <= plan.density_levels[i - 1])
        throw ConfigError("density levels must be strictly increasing");
    }
  }
  for (const auto kind : plan.intersections) {
    const auto spec = build_intersection(kind, plan.sim.geometry);
    const auto capacity = jam_capacity(spec, plan.sim.network_options(0));
    const auto ladder = density_ladder(plan, spec);
    if (ladder.back() > capacity)
      throw ConfigError("density level " + std::to_string(ladder.back()) + " exceeds jam capacity " +
                        std::to_string(capacity) + " of intersection " + spec.id);
  }
}

std::size_t sweep_size(const ExperimentPlan& plan) {
  const std::size_t levels = plan.density_levels.empty() ? plan.density_fractions.size() : plan.density_levels.size();
  return plan.intersections.size() * plan.penetrations.size() * plan.seeds.size() * levels;
}

std::vector<VehicleClass> assign_classes(std::size_t vehicle_count, double penetration, std::uint64_t seed) {
  if (!(penetration >= 0.0 && penetration <= 1.0))
    throw InputError("assign_classes: penetration " + std::to_string(penetration) + " outside [0, 1]");
  const auto rvs = static_cast<std::size_t>(std::llround(penetration * static_cast<double>(vehicle_count)));
  std::vector<VehicleClass> classes(vehicle_count, VehicleClass::human);
  std::fill_n(classes.begin(), rvs, VehicleClass::rv);
  Rng rng(seed);
  shuffle(std::span<VehicleClass>(classes), rng);
  return classes;
}

std::vector<Grant> decide_entrances(const WorldState& world, const HumanGapParams& human) {
  const IntersectionSpec& spec = world.network->intersection;
  std::vector<Claim> claims;
  for (const auto& v : world.vehicles) {
    if (v.phase == Phase::waiting_at_entrance) claims.push_back({v.id, v.movement, v.arrival_time});
  }
  if (claims.empty()) return {};

  EntranceObservation obs;
  obs.occupancy = occupancy(world);
  obs.queued_claims = claims;
  obs.now = world.time;
  obs.last_release = world.last_release;

  std::vector<Proposal> proposals;
  proposals.reserve(claims.size());
  for (const Claim& claim : claims) {
    const VehicleState& v = world.vehicles[claim.vehicle];
    obs.vehicle = v.id;
    obs.vehicle_class = v.vehicle_class;
    obs.movement = v.movement;
    obs.arrival_time = v.arrival_time;
    obs.wait_time = world.time - v.arrival_time;
    const Decision proposed =
        v.vehicle_class == VehicleClass::rv ? rv_policy(obs, spec) : human_right_of_way(obs, spec, human);
    proposals.push_back({v.id, v.movement, v.arrival_time, proposed});
  }
  return failsafe_arbitrate(proposals, spec, obs.occupancy, world.time);
}

RunResult run_sim(const IntersectionSpec& spec, std::size_t vehicle_count, double penetration,
                  std::uint64_t seed, const SimulationParams& params) {
  validate(params);
  RunResult result;
  result.intersection = spec.id;
  result.penetration = penetration;
  result.seed = seed;
  result.vehicle_count = vehicle_count;

  auto network = std::make_shared<const ClosedNetwork>(
      build_closed_network(spec, vehicle_count, params.network_options(seed)));
  const auto segments = detector_segments(*network, params.detector);
  const auto classes = assign_classes(vehicle_count, penetration, seed);
  WorldState world = make_world(network, classes, params.idm, seed);

  Trace trace = make_trace(world);
  record(trace, world);
  const auto steps = static_cast<std::size_t>(std::llround(params.run_duration / params.dt));
  trace.times.reserve(steps + 1);
  trace.positions.reserve((steps + 1) * vehicle_count);
  trace.speeds.reserve((steps + 1) * vehicle_count);

  RunStats& stats = result.stats;
  try {
    for (std::size_t i = 0; i < steps; ++i) {
      for (const auto& v : world.vehicles) {
        if (v.phase != Phase::waiting_at_entrance) continue;
        const double waited = world.time - v.arrival_time;
        stats.max_wait = std::max(stats.max_wait, waited);
        if (waited > params.wait_timeout)
          throw SimulationFault("vehicle " + std::to_string(v.id) + " waited " + std::to_string(waited) +
                                    " s at the entrance (timeout " + std::to_string(params.wait_timeout) + " s)",
                                world.time);
      }
      const auto grants = decide_entrances(world, params.human);
      for (const auto& g : grants) stats.grants += g.decision == Decision::go ? 1 : 0;
      world = step(std::move(world), params.dt, grants, params.idm);
      ++stats.steps;
      ++stats.safety_checks;
      stats.min_gap = std::min(stats.min_gap, min_gap(world));
      record(trace, world);
    }
  } catch (const SimulationFault& fault) {
    result.fault = fault.what();
    return result;
  }

  result.samples = measure_run(trace, segments, params.detector);
  return result;
}

std::vector<RunResult> run_sweep(const ExperimentPlan& plan, const SweepOptions& options) {
  validate(plan);
  struct Task {
    std::string label;
    const IntersectionSpec* spec;
    double penetration;
    std::uint64_t seed;
    std::size_t vehicles;
  };
  std::vector<IntersectionSpec> specs;
  for (const auto kind : plan.intersections) specs.push_back(build_intersection(kind, plan.sim.geometry));

  std::vector<Task> tasks;
  for (const auto& spec : specs) {
    const auto ladder = density_ladder(plan, spec);
    for (const double p : plan.penetrations)
      for (const auto seed : plan.seeds)
        for (const auto n : ladder) tasks.push_back({spec.id, &spec, p, seed, n});
  }
  std::sort(tasks.begin(), tasks.end(), [](const Task& x, const Task& y) {
    return std::tie(x.label, x.penetration, x.seed, x.vehicles) <
           std::tie(y.label, y.penetration, y.seed, y.vehicles);
  });

  std::vector<std::size_t> order(tasks.size());
  std::iota(order.begin(), order.end(), 0);
  if (options.shuffle_seed) {
    Rng rng(*options.shuffle_seed);
    shuffle(std::span<std::size_t>(order), rng);
  }

  std::vector<RunResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < order.size(); i = next++) {
      const Task& t = tasks[order[i]];
      try {
        results[order[i]] = run_sim(*t.spec, t.vehicles, t.penetration, t.seed, plan.sim);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(options.jobs, 1, std::max<std::size_t>(1, tasks.size()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace mixfd
