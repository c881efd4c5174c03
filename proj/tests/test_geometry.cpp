#include <doctest.h>

#include <cmath>

#include "mixfd/errors.hpp"
#include "mixfd/geometry.hpp"
#include "oracles.hpp"

using namespace mixfd;

namespace {

// Rows and columns follow the movement order through/left/right for
// approaches 0..3 (S, E, N, W).
constexpr const char* kFourwayOneLaneConflicts[12] = {
    "000111010110",  // through@0
    "000110101110",  // left@0
    "000000010100",  // right@0
    "110000111010",  // through@1
    "110000110101",  // left@1
    "100000000010",  // right@1
    "010110000111",  // through@2
    "101110000110",  // left@2
    "010100000000",  // right@2
    "111010110000",  // through@3
    "110101110000",  // left@3
    "000010100000",  // right@3
};

oracle::Turn oracle_turn(Turn t) {
  switch (t) {
    case Turn::through: return oracle::Turn::through;
    case Turn::left: return oracle::Turn::left;
    case Turn::right: return oracle::Turn::right;
  }
  return oracle::Turn::through;
}

// Box half-width and leg numbering of each archetype, restated here so the
// oracle does not depend on the implementation's layout helpers.
struct Layout {
  double half_width;
  std::vector<int> legs;
  std::size_t lanes;
};

Layout layout(IntersectionKind kind, const GeometryOptions& g) {
  switch (kind) {
    case IntersectionKind::fourway_1lane: return {g.lane_width + g.corner_margin, {0, 1, 2, 3}, 1};
    case IntersectionKind::fourway_2lane: return {2 * g.lane_width + g.corner_margin, {0, 1, 2, 3}, 2};
    case IntersectionKind::tjunction: return {g.lane_width + g.corner_margin, {0, 1, 3}, 1};
    case IntersectionKind::fourway_asym: return {g.lane_width + g.corner_margin + 3.0, {0, 1, 2, 3}, 1};
  }
  return {};
}

oracle::Polyline oracle_path(const IntersectionSpec& spec, std::size_t m, const GeometryOptions& g) {
  const auto lay = layout(spec.kind, g);
  const auto& mv = spec.movements[m];
  const double offset =
      (static_cast<double>(lay.lanes) - 0.5 - static_cast<double>(spec.movement_lane[m])) * g.lane_width;
  return oracle::junction_path(lay.legs[mv.approach], oracle_turn(mv.turn), lay.half_width, offset);
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("archetype enumeration") {
    const auto four = build_intersection(IntersectionKind::fourway_1lane);
    CHECK(four.approaches == 4);
    CHECK(four.movement_count() == 12);
    const auto tee = build_intersection(IntersectionKind::tjunction);
    CHECK(tee.approaches == 3);
    CHECK(tee.movement_count() == 6);
    CHECK(build_intersection(IntersectionKind::fourway_2lane).lanes_per_approach ==
          std::vector<std::size_t>{2, 2, 2, 2});
  }

  TEST_CASE("labels and parsing") {
    CHECK(build_intersection(IntersectionKind::fourway_1lane).id == "229");
    CHECK(build_intersection(IntersectionKind::fourway_2lane).id == "332");
    CHECK(build_intersection(IntersectionKind::tjunction).id == "334");
    CHECK(build_intersection(IntersectionKind::fourway_asym).id == "499");
    CHECK(parse_intersection_kind("tjunction") == IntersectionKind::tjunction);
    CHECK(parse_intersection_kind("499") == IntersectionKind::fourway_asym);
    CHECK_FALSE(parse_intersection_kind("roundabout").has_value());
  }

  TEST_CASE("four-way single-lane conflict matrix matches the frozen fixture") {
    const auto spec = build_intersection(IntersectionKind::fourway_1lane);
    REQUIRE(spec.movement_count() == 12);
    for (std::size_t i = 0; i < 12; ++i) {
      CHECK(spec.movements[i].approach == i / 3);
      for (std::size_t j = 0; j < 12; ++j) {
        INFO(to_string(spec.movements[i]), " vs ", to_string(spec.movements[j]));
        CHECK(spec.conflicts(i, j) == (kFourwayOneLaneConflicts[i][j] == '1'));
      }
    }
  }

  TEST_CASE("conflict matrices agree with path intersection geometry") {
    const GeometryOptions g;
    for (const auto kind : kAllIntersectionKinds) {
      const auto spec = build_intersection(kind, g);
      std::vector<oracle::Polyline> paths;
      for (std::size_t m = 0; m < spec.movement_count(); ++m) paths.push_back(oracle_path(spec, m, g));
      for (std::size_t i = 0; i < spec.movement_count(); ++i) {
        CHECK(spec.conflict_zone_path_length[i] == doctest::Approx(oracle::polyline_length(paths[i])).epsilon(1e-4));
        for (std::size_t j = 0; j < spec.movement_count(); ++j) {
          if (i == j) continue;
          INFO(spec.id, ": ", to_string(spec.movements[i]), " vs ", to_string(spec.movements[j]));
          CHECK(spec.conflicts(i, j) == oracle::paths_conflict(paths[i], paths[j]));
        }
      }
    }
  }

  TEST_CASE("symmetry and empty diagonal for every archetype") {
    for (const auto kind : kAllIntersectionKinds) {
      const auto spec = build_intersection(kind);
      for (const auto& m1 : spec.movements) {
        CHECK_FALSE(conflicting(spec, m1, m1));
        for (const auto& m2 : spec.movements) CHECK(conflicting(spec, m1, m2) == conflicting(spec, m2, m1));
      }
    }
  }

  TEST_CASE("named conflict examples") {
    const auto spec = build_intersection(IntersectionKind::fourway_1lane);
    CHECK(conflicting(spec, {0, Turn::through}, {1, Turn::through}));
    CHECK_FALSE(conflicting(spec, {0, Turn::through}, {2, Turn::through}));
    CHECK(conflicting(spec, {0, Turn::left}, {2, Turn::through}));
    CHECK_THROWS_AS(conflicting(spec, {0, Turn::through}, {5, Turn::left}), InputError);
    const auto tee = build_intersection(IntersectionKind::tjunction);
    CHECK_THROWS_AS(conflicting(tee, {0, Turn::through}, {1, Turn::through}), InputError);
  }

  TEST_CASE("validate rejects a broken spec") {
    auto spec = build_intersection(IntersectionKind::fourway_1lane);
    spec.conflict[3] = 0;  // clears (through@0, through@1) but not its mirror
    CHECK_THROWS_AS(validate(spec), ConfigError);
  }

  TEST_CASE("asymmetric approaches") {
    const auto spec = build_intersection(IntersectionKind::fourway_asym);
    CHECK(spec.approach_length == std::vector<double>{200.0, 120.0, 280.0, 160.0});
  }

  TEST_CASE("closed network capacity boundaries") {
    const auto spec = build_intersection(IntersectionKind::fourway_1lane);
    const NetworkOptions opts;
    const auto cap = jam_capacity(spec, opts);
    CHECK(cap == 4 * static_cast<std::size_t>(std::ceil(500.0 / 7.0)));

    const auto empty = build_closed_network(spec, 0, opts);
    CHECK(empty.vehicle_count() == 0);

    const auto full = build_closed_network(spec, cap, opts);
    CHECK(full.vehicle_count() == cap);
    for (std::size_t r = 0; r < full.rings.size(); ++r) {
      const auto& members = full.ring_members[r];
      for (std::size_t i = 0; i < members.size(); ++i) {
        const double here = full.initial_position[members[i]];
        const double ahead = full.initial_position[members[(i + 1) % members.size()]];
        double spacing = ahead - here;
        if (spacing <= 0.0) spacing += full.rings[r].length;
        if (i + 1 < members.size()) CHECK(spacing == doctest::Approx(opts.min_spacing));
      }
    }

    try {
      build_closed_network(spec, cap + 1, opts);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(std::to_string(cap)) != std::string::npos);
    }
  }

  TEST_CASE("vehicles are spread over rings in proportion to capacity") {
    const auto spec = build_intersection(IntersectionKind::fourway_asym);
    const auto net = build_closed_network(spec, 100);
    std::size_t total = 0;
    for (std::size_t r = 0; r < net.rings.size(); ++r) {
      const double quota = 100.0 * static_cast<double>(net.rings[r].jam_capacity) /
                           static_cast<double>(net.jam_capacity());
      CHECK(std::abs(static_cast<double>(net.ring_members[r].size()) - quota) < 1.0);
      total += net.ring_members[r].size();
    }
    CHECK(total == 100);
  }

  TEST_CASE("routes cycle through the ring's movements") {
    const auto spec = build_intersection(IntersectionKind::fourway_2lane);
    const auto net = build_closed_network(spec, 50, {7.0, 300.0, 9});
    for (std::size_t v = 0; v < net.vehicle_count(); ++v) {
      const Ring& ring = net.rings[net.vehicle_ring[v]];
      auto route = net.routes[v];
      auto movements = ring.movements;
      std::sort(route.begin(), route.end());
      CHECK(route == movements);
    }
  }
}
