#include <doctest.h>

#include <cmath>
#include <random>

#include "mixfd/errors.hpp"
#include "mixfd/experiment.hpp"
#include "mixfd/fdfit.hpp"

using namespace mixfd;

namespace {

std::vector<FlowPoint> parabola(double a, double b, double c, double k0, double k1, std::size_t n) {
  std::vector<FlowPoint> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double k = k0 + (k1 - k0) * static_cast<double>(i) / static_cast<double>(n - 1);
    pts.push_back({k, (a * k + b) * k + c});
  }
  return pts;
}

RunResult run(const std::string& id, double p, std::uint64_t seed, std::size_t n, std::vector<FlowSample> samples) {
  RunResult r;
  r.intersection = id;
  r.penetration = p;
  r.seed = seed;
  r.vehicle_count = n;
  r.samples = std::move(samples);
  return r;
}

}  // namespace

TEST_SUITE("fdfit") {
  TEST_CASE("noiseless parabola is recovered exactly") {
    const auto pts = parabola(-2.0, 40.0, 0.0, 0.0, 20.0, 21);
    const auto fit = fit_quadratic(pts);
    CHECK(fit.a == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(fit.b == doctest::Approx(40.0).epsilon(1e-9));
    CHECK(std::abs(fit.c) < 1e-6);
    REQUIRE(fit.r_squared);
    CHECK(*fit.r_squared == doctest::Approx(1.0));
    const auto cap = extract_capacity(fit);
    CHECK(cap.k_crit == doctest::Approx(10.0));
    CHECK(cap.q_max == doctest::Approx(200.0));
    CHECK(fit.n_points == 21);
  }

  TEST_CASE("recovery at realistic magnitudes") {
    // Traffic-scale coefficients: k in veh/km, Q in veh/h.
    const auto pts = parabola(-0.0815, 11.3, -12.5, 3.0, 140.0, 60);
    const auto fit = fit_quadratic(pts);
    CHECK(std::abs(fit.a + 0.0815) < 1e-6);
    CHECK(std::abs(fit.b - 11.3) < 1e-6);
    CHECK(std::abs(fit.c + 12.5) < 1e-6);
  }

  TEST_CASE("flat data has no r-squared and no vertex") {
    std::vector<FlowPoint> pts{{1.0, 50.0}, {2.0, 50.0}, {3.0, 50.0}, {4.0, 50.0}};
    const auto fit = fit_quadratic(pts);
    CHECK(fit.a == 0.0);
    CHECK(fit.b == 0.0);
    CHECK(fit.c == 50.0);
    CHECK_FALSE(fit.r_squared);
    CHECK_FALSE(fit.k_crit);
    CHECK_THROWS_AS(extract_capacity(fit), NonConcaveFitError);
  }

  TEST_CASE("least squares beats the generator on noisy data") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise(0.0, 5.0);
    auto pts = parabola(-2.0, 40.0, 0.0, 0.0, 20.0, 41);
    for (auto& p : pts) p.q += noise(rng);
    const auto fit = fit_quadratic(pts);
    const double rss = residual_sum_of_squares(pts, fit.a, fit.b, fit.c);
    CHECK(rss <= residual_sum_of_squares(pts, -2.0, 40.0, 0.0));
    for (const double d : {-1e-3, 1e-3}) {
      CHECK(residual_sum_of_squares(pts, fit.a + d, fit.b, fit.c) >= rss);
      CHECK(residual_sum_of_squares(pts, fit.a, fit.b + d, fit.c) >= rss);
      CHECK(residual_sum_of_squares(pts, fit.a, fit.b, fit.c + d) >= rss);
    }
  }

  TEST_CASE("scaling Q scales the coefficients") {
    std::vector<FlowPoint> pts{{1.0, 3.0}, {2.0, 7.5}, {4.0, 8.0}, {6.0, 4.0}, {7.0, 2.5}};
    auto scaled = pts;
    for (auto& p : scaled) p.q *= 3.0;
    const auto f = fit_quadratic(pts);
    const auto g = fit_quadratic(scaled);
    CHECK(g.a == doctest::Approx(3.0 * f.a));
    CHECK(g.b == doctest::Approx(3.0 * f.b));
    CHECK(g.c == doctest::Approx(3.0 * f.c));
    CHECK(*g.r_squared == doctest::Approx(*f.r_squared));
  }

  TEST_CASE("too few distinct densities") {
    std::vector<FlowPoint> pts{{1.0, 3.0}, {1.0, 4.0}, {2.0, 5.0}, {2.0, 5.5}};
    CHECK_THROWS_AS(fit_quadratic(pts), DegenerateInputError);
    CHECK_THROWS_AS(fit_quadratic(std::vector<FlowPoint>{}), DegenerateInputError);
    pts.push_back({NAN, 1.0});
    CHECK_THROWS_AS(fit_quadratic(pts), DegenerateInputError);
  }

  TEST_CASE("capacity extraction") {
    QuadraticFit f;
    f.a = -1.0;
    f.b = 10.0;
    const auto cap = extract_capacity(f);
    CHECK(cap.k_crit == 5.0);
    CHECK(cap.q_max == 25.0);
    f.a = 0.0;
    CHECK_THROWS_AS(extract_capacity(f), NonConcaveFitError);
    f.a = 0.5;
    CHECK_THROWS_AS(extract_capacity(f), NonConcaveFitError);
  }

  TEST_CASE("fit_all recovers injected parabolas per cell") {
    std::vector<RunResult> results;
    const std::vector<std::string> ids{"229", "332", "334", "499"};
    const std::vector<double> ps{0.0, 0.25, 0.5, 0.75, 1.0};
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = 0; j < ps.size(); ++j) {
        const double a = -0.05 - 0.01 * static_cast<double>(i);
        const double b = 8.0 + static_cast<double>(j);
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
          for (std::size_t n = 10; n <= 60; n += 10) {
            const double k = static_cast<double>(n) + static_cast<double>(seed) * 0.3;
            results.push_back(run(ids[i], ps[j], seed, n, {{k, (a * k + b) * k, 0.0, 120.0, 0.0, 0.0}}));
          }
        }
      }
    }
    const auto table = fit_all(results);
    REQUIRE(table.size() == 20);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = 0; j < ps.size(); ++j) {
        const auto& cell = table.at({ids[i], ps[j]});
        CHECK(cell.status == FitStatus::ok);
        CHECK(flag_text(cell) == "ok");
        REQUIRE(cell.fit);
        CHECK(cell.fit->a == doctest::Approx(-0.05 - 0.01 * static_cast<double>(i)));
        CHECK(cell.fit->b == doctest::Approx(8.0 + static_cast<double>(j)));
        CHECK(cell.points.size() == 18);
      }
    }
  }

  TEST_CASE("fit_all flags faulted, degenerate and convex cells") {
    std::vector<RunResult> results;
    results.push_back(run("229", 0.0, 1, 10, {{1.0, 1.0, 1.0, 0.0, 0.0, 0.0}}));
    results.push_back(run("229", 0.0, 2, 10, {}));
    results.back().fault = "vehicle 3 waited 300 s";
    results.push_back(run("332", 0.0, 1, 10, {{1.0, 1.0, 1.0, 0.0, 0.0, 0.0}, {2.0, 2.0, 1.0, 60.0, 0.0, 0.0}}));
    results.push_back(run("334", 0.0, 1, 10,
                          {{1.0, 1.0, 1.0, 0.0, 0.0, 0.0},
                           {2.0, 4.0, 2.0, 60.0, 0.0, 0.0},
                           {3.0, 9.0, 3.0, 120.0, 0.0, 0.0}}));
    const auto table = fit_all(results);
    const auto& faulted = table.at({"229", 0.0});
    CHECK(faulted.status == FitStatus::faulted);
    CHECK_FALSE(faulted.fit);
    CHECK(flag_text(faulted) == "fault: seed 2 vehicles 10: vehicle 3 waited 300 s");
    const auto& degenerate = table.at({"332", 0.0});
    CHECK(degenerate.status == FitStatus::degenerate);
    CHECK(flag_text(degenerate).rfind("degenerate: ", 0) == 0);
    const auto& convex = table.at({"334", 0.0});
    CHECK(convex.status == FitStatus::non_concave);
    REQUIRE(convex.fit);
    CHECK(convex.fit->a == doctest::Approx(1.0));
  }

  TEST_CASE("fit_all is independent of input order") {
    std::vector<RunResult> results;
    for (std::uint64_t seed = 1; seed <= 3; ++seed)
      for (std::size_t n = 5; n <= 25; n += 5) {
        const double k = static_cast<double>(n * seed);
        results.push_back(run("229", 0.5, seed, n, {{k, -0.1 * k * k + 9.0 * k + static_cast<double>(seed), 0, 0, 0, 0}}));
      }
    const auto forward = fit_all(results);
    std::reverse(results.begin(), results.end());
    const auto backward = fit_all(results);
    const auto& f = forward.at({"229", 0.5});
    const auto& b = backward.at({"229", 0.5});
    CHECK(f.fit->a == b.fit->a);
    CHECK(f.fit->b == b.fit->b);
    CHECK(f.fit->c == b.fit->c);
  }
}
