#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mixfd/coordination.hpp"
#include "mixfd/errors.hpp"
#include "mixfd/experiment.hpp"
#include "mixfd/fdfit.hpp"
#include "mixfd/io.hpp"
#include "mixfd/plot.hpp"
#include "mixfd/report.hpp"

namespace py = pybind11;
using namespace mixfd;

namespace {

using FitTable = std::map<CellKey, CellFit>;

std::vector<FlowPoint> zip_points(const std::vector<double>& k, const std::vector<double>& q) {
  if (k.size() != q.size()) throw InputError("k and q must have the same length");
  std::vector<FlowPoint> points(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) points[i] = {k[i], q[i]};
  return points;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Mixed human/RV traffic at unsignalized intersections: simulation and FD fitting.";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DegenerateInputError>(m, "DegenerateInputError", PyExc_ValueError);
  py::register_exception<NonConcaveFitError>(m, "NonConcaveFitError", PyExc_ValueError);

  py::enum_<Turn>(m, "Turn")
      .value("through", Turn::through)
      .value("left", Turn::left)
      .value("right", Turn::right);

  py::enum_<IntersectionKind>(m, "IntersectionKind")
      .value("fourway_1lane", IntersectionKind::fourway_1lane)
      .value("fourway_2lane", IntersectionKind::fourway_2lane)
      .value("tjunction", IntersectionKind::tjunction)
      .value("fourway_asym", IntersectionKind::fourway_asym);

  py::enum_<Decision>(m, "Decision").value("stop", Decision::stop).value("go", Decision::go);
  py::enum_<VehicleClass>(m, "VehicleClass").value("human", VehicleClass::human).value("rv", VehicleClass::rv);
  py::enum_<DetectorRegion>(m, "DetectorRegion")
      .value("intersection", DetectorRegion::intersection)
      .value("full_circuit", DetectorRegion::full_circuit)
      .value("custom", DetectorRegion::custom);
  py::enum_<FitStatus>(m, "FitStatus")
      .value("ok", FitStatus::ok)
      .value("non_concave", FitStatus::non_concave)
      .value("degenerate", FitStatus::degenerate)
      .value("faulted", FitStatus::faulted);

  py::class_<GeometryOptions>(m, "GeometryOptions")
      .def(py::init<>())
      .def_readwrite("approach_length", &GeometryOptions::approach_length)
      .def_readwrite("entrance_zone_length", &GeometryOptions::entrance_zone_length)
      .def_readwrite("speed_limit", &GeometryOptions::speed_limit)
      .def_readwrite("lane_width", &GeometryOptions::lane_width)
      .def_readwrite("corner_margin", &GeometryOptions::corner_margin);

  py::class_<IntersectionSpec>(m, "IntersectionSpec")
      .def_readonly("id", &IntersectionSpec::id)
      .def_readonly("kind", &IntersectionSpec::kind)
      .def_readonly("approaches", &IntersectionSpec::approaches)
      .def_readonly("lanes_per_approach", &IntersectionSpec::lanes_per_approach)
      .def_readonly("conflict_zone_path_length", &IntersectionSpec::conflict_zone_path_length)
      .def_readonly("approach_length", &IntersectionSpec::approach_length)
      .def_readonly("speed_limit", &IntersectionSpec::speed_limit)
      .def_property_readonly("movements",
                             [](const IntersectionSpec& s) {
                               std::vector<std::pair<int, Turn>> out;
                               for (const auto& mv : s.movements) out.emplace_back(mv.approach, mv.turn);
                               return out;
                             })
      .def("movement_count", &IntersectionSpec::movement_count)
      .def("conflicts", [](const IntersectionSpec& s, std::size_t i, std::size_t j) {
        if (i >= s.movement_count() || j >= s.movement_count()) throw InputError("movement index out of range");
        return s.conflicts(i, j);
      });

  m.def("build_intersection", &build_intersection, py::arg("kind"), py::arg("options") = GeometryOptions{});
  m.def("parse_intersection_kind", [](const std::string& text) { return parse_intersection_kind(text); });
  m.def(
      "conflicting",
      [](const IntersectionSpec& spec, std::pair<int, Turn> a, std::pair<int, Turn> b) {
        if (a.first < 0 || a.first > 255 || b.first < 0 || b.first > 255) throw InputError("bad approach");
        return conflicting(spec, {static_cast<std::uint8_t>(a.first), a.second},
                           {static_cast<std::uint8_t>(b.first), b.second});
      },
      "Whether two (approach, turn) movements conflict.");
  m.def("jam_capacity", [](const IntersectionSpec& spec) { return jam_capacity(spec); });

  py::class_<Proposal>(m, "Proposal")
      .def(py::init([](std::size_t vehicle, std::size_t movement, double arrival_time, Decision decision) {
             return Proposal{vehicle, movement, arrival_time, decision};
           }),
           py::arg("vehicle"), py::arg("movement"), py::arg("arrival_time"), py::arg("decision") = Decision::go)
      .def_readwrite("vehicle", &Proposal::vehicle)
      .def_readwrite("movement", &Proposal::movement)
      .def_readwrite("arrival_time", &Proposal::arrival_time)
      .def_readwrite("decision", &Proposal::decision);

  py::class_<Grant>(m, "Grant")
      .def_readonly("vehicle", &Grant::vehicle)
      .def_readonly("decision", &Grant::decision)
      .def_readonly("issue_time", &Grant::issue_time);

  m.def(
      "failsafe_arbitrate",
      [](const std::vector<Proposal>& proposals, const IntersectionSpec& spec,
         const std::vector<std::size_t>& occupancy, double issue_time) {
        for (const auto& p : proposals)
          if (p.movement >= spec.movement_count()) throw InputError("proposal movement out of range");
        return failsafe_arbitrate(proposals, spec, occupancy, issue_time);
      },
      py::arg("proposals"), py::arg("spec"), py::arg("occupancy") = std::vector<std::size_t>{},
      py::arg("issue_time") = 0.0);

  py::class_<IdmParams>(m, "IdmParams")
      .def(py::init<>())
      .def_readwrite("max_accel", &IdmParams::max_accel)
      .def_readwrite("comfortable_decel", &IdmParams::comfortable_decel)
      .def_readwrite("max_decel", &IdmParams::max_decel)
      .def_readwrite("standstill_gap", &IdmParams::standstill_gap)
      .def_readwrite("time_headway", &IdmParams::time_headway)
      .def_readwrite("exponent", &IdmParams::exponent)
      .def_readwrite("desired_speed", &IdmParams::desired_speed)
      .def_readwrite("vehicle_length", &IdmParams::vehicle_length);

  py::class_<DetectorConfig>(m, "DetectorConfig")
      .def(py::init<>())
      .def_readwrite("region", &DetectorConfig::region)
      .def_readwrite("segment_start", &DetectorConfig::segment_start)
      .def_readwrite("segment_end", &DetectorConfig::segment_end)
      .def_readwrite("window", &DetectorConfig::window)
      .def_readwrite("warmup", &DetectorConfig::warmup);

  py::class_<SimulationParams>(m, "SimulationParams")
      .def(py::init<>())
      .def_readwrite("geometry", &SimulationParams::geometry)
      .def_readwrite("idm", &SimulationParams::idm)
      .def_readwrite("detector", &SimulationParams::detector)
      .def_property(
          "critical_gap", [](const SimulationParams& s) { return s.human.critical_gap; },
          [](SimulationParams& s, double g) { s.human.critical_gap = g; })
      .def_readwrite("return_length", &SimulationParams::return_length)
      .def_readwrite("run_duration", &SimulationParams::run_duration)
      .def_readwrite("dt", &SimulationParams::dt)
      .def_readwrite("wait_timeout", &SimulationParams::wait_timeout);

  py::class_<ExperimentPlan>(m, "ExperimentPlan")
      .def(py::init<>())
      .def_readwrite("intersections", &ExperimentPlan::intersections)
      .def_readwrite("penetrations", &ExperimentPlan::penetrations)
      .def_readwrite("seeds", &ExperimentPlan::seeds)
      .def_readwrite("density_fractions", &ExperimentPlan::density_fractions)
      .def_readwrite("density_levels", &ExperimentPlan::density_levels)
      .def_readwrite("sim", &ExperimentPlan::sim);

  m.def("validate_plan", [](const ExperimentPlan& plan) { validate(plan); });
  m.def("sweep_size", &sweep_size);
  m.def("density_ladder", &density_ladder);

  py::class_<FlowSample>(m, "FlowSample")
      .def_readonly("k", &FlowSample::k)
      .def_readonly("q", &FlowSample::q)
      .def_readonly("v", &FlowSample::v)
      .def_readonly("window_start", &FlowSample::window_start)
      .def_readonly("total_travel_distance", &FlowSample::total_travel_distance)
      .def_readonly("total_travel_time", &FlowSample::total_travel_time);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("intersection", &RunResult::intersection)
      .def_readonly("penetration", &RunResult::penetration)
      .def_readonly("seed", &RunResult::seed)
      .def_readonly("vehicle_count", &RunResult::vehicle_count)
      .def_readonly("samples", &RunResult::samples)
      .def_readonly("fault", &RunResult::fault)
      .def_property_readonly("min_gap", [](const RunResult& r) { return r.stats.min_gap; });

  m.def("assign_classes", &assign_classes, py::arg("vehicle_count"), py::arg("penetration"), py::arg("seed"));
  m.def("run_sim", &run_sim, py::arg("spec"), py::arg("vehicle_count"), py::arg("penetration"), py::arg("seed"),
        py::arg("params") = SimulationParams{}, py::call_guard<py::gil_scoped_release>());
  m.def(
      "run_sweep",
      [](const ExperimentPlan& plan, std::size_t jobs) { return run_sweep(plan, {jobs, std::nullopt}); },
      py::arg("plan"), py::arg("jobs") = 1, py::call_guard<py::gil_scoped_release>());

  py::class_<QuadraticFit>(m, "QuadraticFit")
      .def_readonly("a", &QuadraticFit::a)
      .def_readonly("b", &QuadraticFit::b)
      .def_readonly("c", &QuadraticFit::c)
      .def_readonly("r_squared", &QuadraticFit::r_squared)
      .def_readonly("n_points", &QuadraticFit::n_points)
      .def_readonly("k_crit", &QuadraticFit::k_crit)
      .def_readonly("q_max", &QuadraticFit::q_max)
      .def("__call__", &QuadraticFit::evaluate);

  py::class_<Capacity>(m, "Capacity")
      .def_readonly("k_crit", &Capacity::k_crit)
      .def_readonly("q_max", &Capacity::q_max);

  m.def(
      "fit_quadratic",
      [](const std::vector<double>& k, const std::vector<double>& q) { return fit_quadratic(zip_points(k, q)); },
      py::arg("k"), py::arg("q"));
  m.def(
      "residual_sum_of_squares",
      [](const std::vector<double>& k, const std::vector<double>& q, double a, double b, double c) {
        return residual_sum_of_squares(zip_points(k, q), a, b, c);
      },
      py::arg("k"), py::arg("q"), py::arg("a"), py::arg("b"), py::arg("c"));
  m.def("extract_capacity", &extract_capacity);

  py::class_<CellFit>(m, "CellFit")
      .def_readonly("status", &CellFit::status)
      .def_readonly("fit", &CellFit::fit)
      .def_readonly("reason", &CellFit::reason)
      .def_property_readonly("flag", &flag_text)
      .def_property_readonly("n_points", [](const CellFit& c) { return c.points.size(); });

  // Fit tables cross into Python as dicts keyed by (intersection, penetration).
  m.def("fit_all", [](const std::vector<RunResult>& results) { return fit_all(results); });

  m.def("runs_csv", [](const std::vector<RunResult>& results) {
    std::ostringstream out;
    write_runs_csv(out, results);
    return out.str();
  });
  m.def("fits_csv", [](const FitTable& table) {
    std::ostringstream out;
    const auto rows = fit_rows(table);
    write_fits_csv(out, rows);
    return out.str();
  });
  m.def("read_runs_csv", [](const std::string& text) {
    std::istringstream in(text);
    return read_runs_csv(in);
  });
  m.def("render_report", [](const FitTable& table) {
    const auto rows = fit_rows(table);
    return render_report(rows);
  });
  m.def("render_fd_svg", [](const FitTable& table, const std::string& intersection) {
    const auto series = plot_series(table, intersection);
    return render_fd_svg(intersection, series);
  });
}
