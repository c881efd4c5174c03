#include "mixfd/cli.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "mixfd/errors.hpp"
#include "mixfd/fdfit.hpp"
#include "mixfd/io.hpp"
#include "mixfd/plot.hpp"
#include "mixfd/report.hpp"

namespace mixfd {

namespace {

void check_keys(const YAML::Node& node, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!node.IsMap()) throw ConfigError(where + " must be a mapping");
  for (const auto& entry : node) {
    const auto key = entry.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& name) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("bad value for " + name);
  }
}

template <class T>
void read(const YAML::Node& parent, const char* key, const std::string& where, T& out) {
  if (const auto node = parent[key]) out = scalar<T>(node, where + "." + key);
}

template <class T>
void read_list(const YAML::Node& parent, const char* key, const std::string& where, std::vector<T>& out) {
  const auto node = parent[key];
  if (!node) return;
  const std::string name = where + "." + key;
  if (!node.IsSequence()) throw ConfigError(name + " must be a list");
  out.clear();
  for (const auto& item : node) out.push_back(scalar<T>(item, name));
}

void read_plan(const YAML::Node& node, ExperimentPlan& plan) {
  check_keys(node, "plan",
             {"intersections", "penetrations", "seeds", "density_levels", "density_fractions", "run_duration", "dt"});
  std::vector<std::string> names;
  read_list(node, "intersections", "plan", names);
  if (node["intersections"]) {
    plan.intersections.clear();
    for (const auto& name : names) {
      const auto kind = parse_intersection_kind(name);
      if (!kind) throw ConfigError("unknown intersection '" + name + "'");
      plan.intersections.push_back(*kind);
    }
  }
  read_list(node, "penetrations", "plan", plan.penetrations);
  read_list(node, "seeds", "plan", plan.seeds);
  read_list(node, "density_levels", "plan", plan.density_levels);
  read_list(node, "density_fractions", "plan", plan.density_fractions);
  read(node, "run_duration", "plan", plan.sim.run_duration);
  read(node, "dt", "plan", plan.sim.dt);
}

void read_detector(const YAML::Node& node, DetectorConfig& d) {
  check_keys(node, "detector", {"region", "segment_start", "segment_end", "window", "warmup"});
  if (const auto region = node["region"]) {
    const auto text = scalar<std::string>(region, "detector.region");
    if (text == "intersection")
      d.region = DetectorRegion::intersection;
    else if (text == "full_circuit")
      d.region = DetectorRegion::full_circuit;
    else if (text == "custom")
      d.region = DetectorRegion::custom;
    else
      throw ConfigError("detector.region must be intersection, full_circuit or custom, got '" + text + "'");
  }
  read(node, "segment_start", "detector", d.segment_start);
  read(node, "segment_end", "detector", d.segment_end);
  read(node, "window", "detector", d.window);
  read(node, "warmup", "detector", d.warmup);
}

void read_dynamics(const YAML::Node& node, SimulationParams& sim) {
  check_keys(node, "dynamics",
             {"max_accel", "comfortable_decel", "max_decel", "standstill_gap", "time_headway", "exponent",
              "desired_speed", "vehicle_length", "return_length", "wait_timeout"});
  IdmParams& p = sim.idm;
  read(node, "max_accel", "dynamics", p.max_accel);
  read(node, "comfortable_decel", "dynamics", p.comfortable_decel);
  read(node, "max_decel", "dynamics", p.max_decel);
  read(node, "standstill_gap", "dynamics", p.standstill_gap);
  read(node, "time_headway", "dynamics", p.time_headway);
  read(node, "exponent", "dynamics", p.exponent);
  read(node, "desired_speed", "dynamics", p.desired_speed);
  read(node, "vehicle_length", "dynamics", p.vehicle_length);
  read(node, "return_length", "dynamics", sim.return_length);
  read(node, "wait_timeout", "dynamics", sim.wait_timeout);
}

void read_geometry(const YAML::Node& node, GeometryOptions& g) {
  check_keys(node, "geometry",
             {"approach_length", "entrance_zone_length", "speed_limit", "lane_width", "corner_margin"});
  read(node, "approach_length", "geometry", g.approach_length);
  read(node, "entrance_zone_length", "geometry", g.entrance_zone_length);
  read(node, "speed_limit", "geometry", g.speed_limit);
  read(node, "lane_width", "geometry", g.lane_width);
  read(node, "corner_margin", "geometry", g.corner_margin);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

// Files are rendered in memory first so a failure before this point leaves
// the output directory untouched.
void write_all(const std::filesystem::path& dir, const std::vector<std::pair<std::string, std::string>>& files,
               CommandResult& result) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : files) {
    write_file(dir / name, content);
    result.written.push_back(dir / name);
  }
}

void add_fit_outputs(const std::map<CellKey, CellFit>& table, bool emit_plots,
                     std::vector<std::pair<std::string, std::string>>& files) {
  const auto rows = fit_rows(table);
  std::ostringstream fits;
  write_fits_csv(fits, rows);
  files.emplace_back("fits.csv", fits.str());
  files.emplace_back("report.md", render_report(rows));
  if (!emit_plots) return;
  std::set<std::string> ids;
  for (const auto& [key, cell] : table) ids.insert(key.first);
  for (const auto& id : ids) {
    const auto series = plot_series(table, id);
    files.emplace_back("fd_" + id + ".svg", render_fd_svg(id, series));
  }
}

void count_cells(std::span<const RunResult> results, const std::map<CellKey, CellFit>& table, CommandResult& r) {
  r.runs = results.size();
  r.cells = table.size();
  std::map<CellKey, std::pair<std::size_t, std::size_t>> tally;  // (runs, faulted)
  for (const auto& run : results) {
    auto& t = tally[{run.intersection, run.penetration}];
    ++t.first;
    if (run.fault) {
      ++t.second;
      ++r.faulted_runs;
    }
  }
  for (const auto& [key, t] : tally) r.fully_faulted_cells += t.first == t.second ? 1 : 0;
  r.exit_code = r.fully_faulted_cells > 0 ? kExitAllFaulted : kExitOk;
}

}  // namespace

CliConfig parse_config(std::string_view yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  CliConfig config;
  if (root.IsNull()) {
    validate(config.plan);
    return config;
  }
  try {
    check_keys(root, "config", {"plan", "detector", "dynamics", "coordination", "geometry", "output", "jobs"});
    if (const auto n = root["plan"]) read_plan(n, config.plan);
    if (const auto n = root["detector"]) read_detector(n, config.plan.sim.detector);
    if (const auto n = root["dynamics"]) read_dynamics(n, config.plan.sim);
    if (const auto n = root["coordination"]) {
      check_keys(n, "coordination", {"critical_gap"});
      read(n, "critical_gap", "coordination", config.plan.sim.human.critical_gap);
    }
    if (const auto n = root["geometry"]) read_geometry(n, config.plan.sim.geometry);
    if (const auto n = root["output"]) {
      check_keys(n, "output", {"dir", "plots"});
      if (const auto dir = n["dir"]) config.out_dir = scalar<std::string>(dir, "output.dir");
      read(n, "plots", "output", config.emit_plots);
    }
    if (const auto n = root["jobs"]) {
      const auto jobs = scalar<long long>(n, "jobs");
      if (jobs < 1) throw ConfigError("jobs must be at least 1");
      config.jobs = static_cast<std::size_t>(jobs);
    }
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate(config.plan);
  return config;
}

CliConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = std::min(text.find(',', start), text.size());
    const auto field = text.substr(start, comma - start);
    std::uint64_t seed = 0;
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), seed);
    if (field.empty() || ec != std::errc{} || end != field.data() + field.size())
      throw ConfigError("bad seed '" + std::string(field) + "' in seed list");
    seeds.push_back(seed);
    start = comma + 1;
  }
  return seeds;
}

CommandResult cmd_sweep(const CliConfig& config) {
  validate(config.plan);
  const auto results = run_sweep(config.plan, {config.jobs, std::nullopt});
  const auto table = fit_all(results);

  CommandResult result;
  count_cells(results, table, result);

  std::vector<std::pair<std::string, std::string>> files;
  std::ostringstream runs;
  write_runs_csv(runs, results);
  files.emplace_back("runs.csv", runs.str());
  std::ostringstream faults;
  write_faults_csv(faults, results);
  files.emplace_back("faults.csv", faults.str());
  add_fit_outputs(table, config.emit_plots, files);
  write_all(config.out_dir, files, result);
  return result;
}

CommandResult cmd_fit(const std::filesystem::path& runs_csv, const std::filesystem::path& out_dir, bool emit_plots) {
  std::ifstream runs(runs_csv, std::ios::binary);
  if (!runs) throw InputError("cannot read " + runs_csv.string());
  const auto faults_path = runs_csv.parent_path() / "faults.csv";
  std::ifstream faults;
  if (std::filesystem::exists(faults_path)) faults.open(faults_path, std::ios::binary);
  const auto results = read_runs_csv(runs, faults.is_open() ? &faults : nullptr);
  if (results.empty()) throw InputError(runs_csv.string() + ": no cells to fit");
  const auto table = fit_all(results);

  CommandResult result;
  count_cells(results, table, result);
  std::vector<std::pair<std::string, std::string>> files;
  add_fit_outputs(table, emit_plots, files);
  write_all(out_dir, files, result);
  return result;
}

}  // namespace mixfd
