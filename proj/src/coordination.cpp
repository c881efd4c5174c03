#include "mixfd/coordination.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

namespace mixfd {

namespace {

bool blocked_by_occupancy(const EntranceObservation& obs, const IntersectionSpec& spec) {
  return std::any_of(obs.occupancy.begin(), obs.occupancy.end(),
                     [&](std::size_t held) { return spec.conflicts(obs.movement, held); });
}

bool blocked_by_earlier_claim(const EntranceObservation& obs, const IntersectionSpec& spec) {
  return std::any_of(obs.queued_claims.begin(), obs.queued_claims.end(), [&](const Claim& c) {
    return c.vehicle != obs.vehicle && c.arrival_time < obs.arrival_time &&
           spec.conflicts(obs.movement, c.movement);
  });
}

}  // namespace

Decision rv_policy(const EntranceObservation& obs, const IntersectionSpec& spec) {
  if (blocked_by_occupancy(obs, spec) || blocked_by_earlier_claim(obs, spec)) return Decision::stop;
  return Decision::go;
}

Decision human_right_of_way(const EntranceObservation& obs, const IntersectionSpec& spec,
                            const HumanGapParams& params) {
  if (blocked_by_occupancy(obs, spec) || blocked_by_earlier_claim(obs, spec)) return Decision::stop;
  for (std::size_t m = 0; m < obs.last_release.size(); ++m) {
    if (spec.conflicts(obs.movement, m) && obs.now - obs.last_release[m] < params.critical_gap)
      return Decision::stop;
  }
  return Decision::go;
}

std::vector<Grant> failsafe_arbitrate(std::span<const Proposal> proposals,
                                      const IntersectionSpec& spec,
                                      std::span<const std::size_t> occupancy, double issue_time) {
  std::vector<Grant> grants(proposals.size());
  std::vector<std::size_t> order(proposals.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::tie(proposals[x].arrival_time, proposals[x].vehicle) <
           std::tie(proposals[y].arrival_time, proposals[y].vehicle);
  });

  std::vector<std::size_t> held(occupancy.begin(), occupancy.end());
  for (const std::size_t i : order) {
    const Proposal& p = proposals[i];
    grants[i] = {p.vehicle, Decision::stop, issue_time};
    if (p.decision != Decision::go) continue;
    const bool clear = std::none_of(held.begin(), held.end(),
                                    [&](std::size_t m) { return spec.conflicts(p.movement, m); });
    if (clear) {
      grants[i].decision = Decision::go;
      held.push_back(p.movement);
    }
  }
  return grants;
}

}  // namespace mixfd
