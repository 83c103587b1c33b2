#include "rescade/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "rescade/errors.hpp"

namespace rescade {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ReportFormat parse_report_format(const std::string& name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "structured") return ReportFormat::structured;
  throw InvalidArgumentError("unknown format '" + name +
                             "' (expected csv or structured)");
}

std::optional<double> fit_loglog_slope(const std::vector<RateRow>& rows,
                                       bool linear_axis) {
  std::vector<double> xs, ys;
  for (const RateRow& r : rows) {
    if (!(r.measured_error > 1e-12)) continue;  // treat as converged/noise
    xs.push_back(linear_axis ? r.axis_value : std::log(r.axis_value));
    ys.push_back(std::log(r.measured_error));
  }
  if (xs.size() < 3) return std::nullopt;
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return std::nullopt;
  return (n * sxy - sx * sy) / denom;
}

namespace {

using nlohmann::json;

void validate_rows(const RateReport& report) {
  double prev = -std::numeric_limits<double>::infinity();
  for (const RateRow& r : report.rows) {
    if (!(r.axis_value > prev))
      throw InvalidArgumentError("report rows are not sorted by axis value");
    prev = r.axis_value;
    if (!std::isfinite(r.measured_error) || r.measured_error < 0.0)
      throw InvalidArgumentError("report carries a non-finite or negative error");
  }
}

std::string to_csv(const RateReport& report) {
  std::string out = "axis_value,measured_error,runtime_ms,seed\n";
  for (const RateRow& r : report.rows) {
    out += format_double(r.axis_value);
    out += ',';
    out += format_double(r.measured_error);
    out += ',';
    out += format_double(r.runtime_ms);
    out += ',';
    out += std::to_string(r.seed);
    out += '\n';
  }
  return out;
}

json to_json(const RateReport& report) {
  json rows = json::array();
  for (const RateRow& r : report.rows)
    rows.push_back(json{{"axis_value", r.axis_value},
                        {"measured_error", r.measured_error},
                        {"runtime_ms", r.runtime_ms},
                        {"seed", r.seed}});
  json j{{"function", report.function_name},
         {"dims", report.dims},
         {"smoothness", report.smoothness},
         {"axis", report.axis},
         {"rows", std::move(rows)},
         {"failed_axis_values", report.failed_axis_values},
         {"config", report.config_echo}};
  if (report.fitted_slope)
    j["fitted_slope"] = *report.fitted_slope;
  else
    j["fitted_slope"] = nullptr;
  if (!report.projection_term_unit.empty()) {
    j["projection_term_unit"] = report.projection_term_unit;
    j["projection_term_scaled"] = report.projection_term_scaled;
  }
  return j;
}

RateReport from_json(const json& j) {
  RateReport report;
  report.function_name = j.at("function").get<std::string>();
  report.dims = j.at("dims").get<int>();
  report.smoothness = j.at("smoothness").get<int>();
  report.axis = j.at("axis").get<std::string>();
  for (const json& r : j.at("rows")) {
    RateRow row;
    row.axis_value = r.at("axis_value").get<double>();
    row.measured_error = r.at("measured_error").get<double>();
    row.runtime_ms = r.at("runtime_ms").get<double>();
    row.seed = r.at("seed").get<std::uint64_t>();
    report.rows.push_back(row);
  }
  if (!j.at("fitted_slope").is_null())
    report.fitted_slope = j.at("fitted_slope").get<double>();
  report.failed_axis_values =
      j.at("failed_axis_values").get<std::vector<double>>();
  report.config_echo =
      j.at("config").get<std::map<std::string, std::string>>();
  if (j.contains("projection_term_unit")) {
    report.projection_term_unit =
        j.at("projection_term_unit").get<std::vector<double>>();
    report.projection_term_scaled =
        j.at("projection_term_scaled").get<std::vector<double>>();
  }
  return report;
}

RateReport rows_from_csv(const std::string& text) {
  RateReport report;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) ||
      line != "axis_value,measured_error,runtime_ms,seed")
    throw IoError("missing or unexpected CSV header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    RateRow row;
    char* end = nullptr;
    const char* s = line.c_str();
    row.axis_value = std::strtod(s, &end);
    if (end == s || *end != ',') throw IoError("bad CSV row: " + line);
    s = end + 1;
    row.measured_error = std::strtod(s, &end);
    if (end == s || *end != ',') throw IoError("bad CSV row: " + line);
    s = end + 1;
    row.runtime_ms = std::strtod(s, &end);
    if (end == s || *end != ',') throw IoError("bad CSV row: " + line);
    s = end + 1;
    row.seed = std::strtoull(s, &end, 10);
    if (end == s) throw IoError("bad CSV row: " + line);
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace

std::string report_to_string(const RateReport& report, ReportFormat format) {
  validate_rows(report);
  if (format == ReportFormat::csv) return to_csv(report);
  return to_json(report).dump(2) + "\n";
}

void emit_report(const RateReport& report, const std::string& path,
                 ReportFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << report_to_string(report, format);
  if (!out) throw IoError("failed writing '" + path + "'");
}

RateReport read_report(const std::string& path, ReportFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (format == ReportFormat::csv) return rows_from_csv(text);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError("bad JSON in '" + path + "': " + e.what());
  }
  try {
    return from_json(j);
  } catch (const json::exception& e) {
    throw IoError("unexpected JSON shape in '" + path + "': " + e.what());
  }
}

}  // namespace rescade
