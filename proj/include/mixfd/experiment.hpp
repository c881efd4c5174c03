#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mixfd/coordination.hpp"
#include "mixfd/dynamics.hpp"
#include "mixfd/geometry.hpp"
#include "mixfd/measurement.hpp"

namespace mixfd {

/// Everything a single run needs besides its cell coordinates.
struct SimulationParams {
  GeometryOptions geometry;
  IdmParams idm;
  HumanGapParams human;
  DetectorConfig detector;
  double return_length = 300.0;
  double run_duration = 900.0;
  double dt = 0.2;
  // Longest a vehicle may wait at an entrance before the run is declared faulted.
  double wait_timeout = 300.0;

  NetworkOptions network_options(std::uint64_t seed) const {
    return {idm.vehicle_length + idm.standstill_gap, return_length, seed};
  }
};

void validate(const SimulationParams& params);

/// Fractions of jam capacity: geometric from 5% to 30%, then linear to 95%.
std::vector<double> default_density_fractions();

struct ExperimentPlan {
  std::vector<IntersectionKind> intersections{std::begin(kAllIntersectionKinds),
                                              std::end(kAllIntersectionKinds)};
  std::vector<double> penetrations{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  // Density ladder as fractions of each intersection's jam capacity ...
  std::vector<double> density_fractions = default_density_fractions();
  // ... or, when non-empty, as explicit vehicle counts used for every intersection.
  std::vector<std::size_t> density_levels;
  SimulationParams sim;
};

/// Throws ConfigError on any invalid field, including counts above jam capacity.
void validate(const ExperimentPlan& plan);

/// Strictly increasing vehicle counts for one intersection.
std::vector<std::size_t> density_ladder(const ExperimentPlan& plan, const IntersectionSpec& spec);

std::size_t sweep_size(const ExperimentPlan& plan);

struct RunStats {
  std::size_t steps = 0;
  std::size_t grants = 0;
  double min_gap = kInfiniteGap;
  double max_wait = 0.0;
  // Steps checked for conflict-zone mutual exclusion and gap sign.
  std::size_t safety_checks = 0;
};

struct RunResult {
  std::string intersection;
  double penetration = 0.0;
  std::uint64_t seed = 0;
  std::size_t vehicle_count = 0;
  std::vector<FlowSample> samples;
  std::optional<std::string> fault;
  RunStats stats;
};

/// Exactly round(penetration * vehicle_count) RVs, placed by a seeded shuffle.
std::vector<VehicleClass> assign_classes(std::size_t vehicle_count, double penetration, std::uint64_t seed);

/// Entrance grants for every waiting vehicle: each proposes through its
/// class policy and the fail-safe arbiter settles the set.
std::vector<Grant> decide_entrances(const WorldState& world, const HumanGapParams& human);

/// One deterministic run. Configuration errors throw; faults while stepping
/// end the run and are recorded in the result.
RunResult run_sim(const IntersectionSpec& spec, std::size_t vehicle_count, double penetration,
                  std::uint64_t seed, const SimulationParams& params);

struct SweepOptions {
  std::size_t jobs = 1;
  // Executes runs in a shuffled order; output order is unaffected.
  std::optional<std::uint64_t> shuffle_seed;
};

/// All runs of the plan in (intersection, penetration, seed, vehicle_count) order.
std::vector<RunResult> run_sweep(const ExperimentPlan& plan, const SweepOptions& options = {});

}  // namespace mixfd
