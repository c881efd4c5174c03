#include "mixfd/io.hpp"

#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <tuple>

#include "mixfd/errors.hpp"

namespace mixfd {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

// Reads the next line without its terminator; strips a CR left by CRLF files.
bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

class LineReader {
 public:
  LineReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  void expect_header(std::string_view header) {
    std::string line;
    if (!next_line(in_, line)) fail(1, "missing header");
    line_no_ = 1;
    if (line != header) fail(1, "unexpected header '" + line + "', want '" + std::string(header) + "'");
  }

  // Skips blank lines; false at end of input.
  bool next(std::vector<std::string_view>& fields, std::size_t expected) {
    while (next_line(in_, line_)) {
      ++line_no_;
      if (line_.empty()) continue;
      fields = split(line_);
      if (fields.size() != expected)
        fail(line_no_, "expected " + std::to_string(expected) + " fields, got " + std::to_string(fields.size()));
      return true;
    }
    return false;
  }

  double number(std::string_view field, const char* column) const {
    const auto value = parse_double(field);
    if (!value) fail(line_no_, std::string("bad ") + column + " '" + std::string(field) + "'");
    return *value;
  }

  std::optional<double> optional_number(std::string_view field, const char* column) const {
    if (field.empty()) return std::nullopt;
    return number(field, column);
  }

  template <class T>
  T integer(std::string_view field, const char* column) const {
    T value{};
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || end != field.data() + field.size() || field.empty())
      fail(line_no_, std::string("bad ") + column + " '" + std::string(field) + "'");
    return value;
  }

  [[noreturn]] void fail(std::size_t line, const std::string& what) const {
    throw InputError(name_ + " line " + std::to_string(line) + ": " + what);
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::string name_;
  std::string line_;
  std::size_t line_no_ = 0;
};

std::string optional_text(const std::optional<double>& value) {
  return value ? format_double(*value) : std::string();
}

using RunKey = std::tuple<std::string, double, std::uint64_t, std::size_t>;

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw std::logic_error("format_double: buffer too small");
  return std::string(buf, end);
}

std::optional<double> parse_double(std::string_view text) {
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) return std::nullopt;
  return value;
}

std::string csv_text(std::string_view text) {
  std::string out(text);
  for (char& ch : out) {
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  }
  return out;
}

std::vector<FitRow> fit_rows(const std::map<CellKey, CellFit>& table) {
  std::vector<FitRow> rows;
  rows.reserve(table.size());
  for (const auto& [key, cell] : table) {
    FitRow row;
    row.intersection = key.first;
    row.penetration = key.second;
    row.n_points = cell.points.size();
    row.flag = csv_text(flag_text(cell));
    if (cell.fit) {
      row.a = cell.fit->a;
      row.b = cell.fit->b;
      row.c = cell.fit->c;
      row.r_squared = cell.fit->r_squared;
      row.k_crit = cell.fit->k_crit;
      row.q_max = cell.fit->q_max;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_runs_csv(std::ostream& out, std::span<const RunResult> results) {
  std::vector<const RunResult*> order;
  for (const auto& r : results) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](const RunResult* x, const RunResult* y) {
    return std::tie(x->intersection, x->penetration, x->seed, x->vehicle_count) <
           std::tie(y->intersection, y->penetration, y->seed, y->vehicle_count);
  });
  out << kRunsHeader << '\n';
  for (const RunResult* r : order) {
    const std::string prefix = r->intersection + ',' + format_double(r->penetration) + ',' +
                               std::to_string(r->seed) + ',' + std::to_string(r->vehicle_count) + ',';
    for (const auto& s : r->samples) {
      out << prefix << format_double(s.window_start) << ',' << format_double(s.k) << ',' << format_double(s.q)
          << ',' << format_double(s.v) << '\n';
    }
  }
}

void write_fits_csv(std::ostream& out, std::span<const FitRow> rows) {
  out << kFitsHeader << '\n';
  for (const auto& row : rows) {
    out << row.intersection << ',' << format_double(row.penetration) << ',' << optional_text(row.a) << ','
        << optional_text(row.b) << ',' << optional_text(row.c) << ',' << optional_text(row.r_squared) << ','
        << optional_text(row.k_crit) << ',' << optional_text(row.q_max) << ',' << row.n_points << ','
        << csv_text(row.flag) << '\n';
  }
}

void write_faults_csv(std::ostream& out, std::span<const RunResult> results) {
  out << kFaultsHeader << '\n';
  for (const auto& r : results) {
    if (!r.fault) continue;
    out << r.intersection << ',' << format_double(r.penetration) << ',' << r.seed << ',' << r.vehicle_count << ','
        << csv_text(*r.fault) << '\n';
  }
}

std::vector<RunResult> read_runs_csv(std::istream& runs, std::istream* faults) {
  std::map<RunKey, RunResult> table;
  auto result_for = [&](const RunKey& key) -> RunResult& {
    auto [it, inserted] = table.try_emplace(key);
    if (inserted) {
      it->second.intersection = std::get<0>(key);
      it->second.penetration = std::get<1>(key);
      it->second.seed = std::get<2>(key);
      it->second.vehicle_count = std::get<3>(key);
    }
    return it->second;
  };

  LineReader reader(runs, "runs.csv");
  reader.expect_header(kRunsHeader);
  std::vector<std::string_view> f;
  while (reader.next(f, 8)) {
    if (f[0].empty()) reader.fail(reader.line_no(), "empty intersection");
    const RunKey key{std::string(f[0]), reader.number(f[1], "penetration"),
                     reader.integer<std::uint64_t>(f[2], "seed"),
                     reader.integer<std::size_t>(f[3], "vehicle_count")};
    FlowSample s;
    s.window_start = reader.number(f[4], "window_start");
    s.k = reader.number(f[5], "k");
    s.q = reader.number(f[6], "Q");
    s.v = reader.number(f[7], "V");
    auto& samples = result_for(key).samples;
    if (!samples.empty() && !(samples.back().window_start < s.window_start))
      reader.fail(reader.line_no(), "window_start not increasing within its run");
    samples.push_back(s);
  }

  if (faults) {
    LineReader fault_reader(*faults, "faults.csv");
    fault_reader.expect_header(kFaultsHeader);
    while (fault_reader.next(f, 5)) {
      const RunKey key{std::string(f[0]), fault_reader.number(f[1], "penetration"),
                       fault_reader.integer<std::uint64_t>(f[2], "seed"),
                       fault_reader.integer<std::size_t>(f[3], "vehicle_count")};
      RunResult& r = result_for(key);
      if (!r.samples.empty() || r.fault) fault_reader.fail(fault_reader.line_no(), "faulted run also has samples");
      r.fault = std::string(f[4]);
    }
  }

  std::vector<RunResult> out;
  out.reserve(table.size());
  for (auto& [key, r] : table) out.push_back(std::move(r));
  return out;
}

std::vector<FitRow> read_fits_csv(std::istream& in) {
  LineReader reader(in, "fits.csv");
  reader.expect_header(kFitsHeader);
  std::vector<FitRow> rows;
  std::vector<std::string_view> f;
  while (reader.next(f, 10)) {
    FitRow row;
    row.intersection = std::string(f[0]);
    row.penetration = reader.number(f[1], "penetration");
    row.a = reader.optional_number(f[2], "a");
    row.b = reader.optional_number(f[3], "b");
    row.c = reader.optional_number(f[4], "c");
    row.r_squared = reader.optional_number(f[5], "r_squared");
    row.k_crit = reader.optional_number(f[6], "k_crit");
    row.q_max = reader.optional_number(f[7], "q_max");
    row.n_points = reader.integer<std::size_t>(f[8], "n_points");
    row.flag = std::string(f[9]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace mixfd
