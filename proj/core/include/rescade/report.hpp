#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rescade {

// "%.17g": enough digits that text -> double -> text round-trips every finite
// value bit-exactly. All numeric output (reports, model files) goes through
// this.
std::string format_double(double v);

enum class ReportFormat { csv, structured };
ReportFormat parse_report_format(const std::string& name);

struct RateRow {
  double axis_value = 0.0;
  double measured_error = 0.0;
  double runtime_ms = 0.0;  // 0 unless timings were explicitly recorded
  std::uint64_t seed = 0;
};

// One study = one report: error against a single swept axis for a single
// target function.
struct RateReport {
  std::string function_name;
  int dims = 0;
  int smoothness = 0;
  std::string axis;  // "width_N", "depth_l", or "hilbert_k"
  std::vector<RateRow> rows;
  std::optional<double> fitted_slope;
  std::map<std::string, std::string> config_echo;
  std::vector<double> failed_axis_values;  // axis points whose run faulted
  // hilbert_k studies also carry the per-row bound split (parallel to rows).
  std::vector<double> projection_term_unit;
  std::vector<double> projection_term_scaled;
};

// Least-squares slope of log(error) against the axis (log of it unless
// linear_axis). Rows at or below 1e-12 error are noise and are excluded;
// absent unless at least 3 rows survive.
std::optional<double> fit_loglog_slope(const std::vector<RateRow>& rows,
                                       bool linear_axis);

// CSV carries exactly the row table (axis_value, measured_error, runtime_ms,
// seed); the structured format (JSON) carries every field. Both round-trip
// doubles bit-exactly.
void emit_report(const RateReport& report, const std::string& path,
                 ReportFormat format);
std::string report_to_string(const RateReport& report, ReportFormat format);
RateReport read_report(const std::string& path, ReportFormat format);

}  // namespace rescade
