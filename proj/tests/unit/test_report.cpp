#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "rescade/errors.hpp"
#include "rescade/report.hpp"

using rescade::RateReport;
using rescade::RateRow;
using rescade::ReportFormat;

namespace {

std::string temp_path(const std::string& stem) {
  return (std::filesystem::temp_directory_path() / stem).string();
}

RateReport sample_report() {
  RateReport rep;
  rep.function_name = "tanh2x";
  rep.dims = 1;
  rep.smoothness = 3;
  rep.axis = "width_N";
  rep.rows = {
      {2.0, 0.1234567890123456789, 0.0, 7},
      {4.0, 3.0000000000000004e-05, 0.0, 8},
      {8.0, 1e-300, 12.5, 9},
  };
  rep.fitted_slope = -1.9999999999999998;
  rep.config_echo["seed"] = "7";
  rep.config_echo["grid_points"] = "129";
  rep.failed_axis_values = {16.0};
  return rep;
}

}  // namespace

TEST_CASE("format_double round-trips doubles through text exactly") {
  const double values[] = {0.1,
                           3.141592653589793,
                           1e-300,
                           -1e300,
                           4.9406564584124654e-324,  // smallest denormal
                           -0.0,
                           1.0 / 3.0};
  for (double v : values) {
    const std::string s = rescade::format_double(v);
    const double back = std::strtod(s.c_str(), nullptr);
    REQUIRE(std::memcmp(&back, &v, sizeof v) == 0);
  }
}

TEST_CASE("csv report round-trips rows bit-exactly") {
  const RateReport rep = sample_report();
  const std::string path = temp_path("rescade_test_rows.csv");
  rescade::emit_report(rep, path, ReportFormat::csv);

  // Exact header line.
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "axis_value,measured_error,runtime_ms,seed");
  in.close();

  const RateReport back = rescade::read_report(path, ReportFormat::csv);
  REQUIRE(back.rows.size() == rep.rows.size());
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    REQUIRE(back.rows[i].axis_value == rep.rows[i].axis_value);
    REQUIRE(back.rows[i].measured_error == rep.rows[i].measured_error);
    REQUIRE(back.rows[i].runtime_ms == rep.rows[i].runtime_ms);
    REQUIRE(back.rows[i].seed == rep.rows[i].seed);
  }
  std::filesystem::remove(path);
}

TEST_CASE("structured report round-trips every field") {
  RateReport rep = sample_report();
  rep.projection_term_unit = {0.5, 0.25, 0.125};
  rep.projection_term_scaled = {1.0, 0.5, 0.25};
  const std::string path = temp_path("rescade_test_report.json");
  rescade::emit_report(rep, path, ReportFormat::structured);
  const RateReport back = rescade::read_report(path, ReportFormat::structured);

  CHECK(back.function_name == rep.function_name);
  CHECK(back.dims == rep.dims);
  CHECK(back.smoothness == rep.smoothness);
  CHECK(back.axis == rep.axis);
  REQUIRE(back.fitted_slope.has_value());
  CHECK(*back.fitted_slope == *rep.fitted_slope);
  CHECK(back.config_echo == rep.config_echo);
  CHECK(back.failed_axis_values == rep.failed_axis_values);
  CHECK(back.projection_term_unit == rep.projection_term_unit);
  CHECK(back.projection_term_scaled == rep.projection_term_scaled);
  REQUIRE(back.rows.size() == rep.rows.size());
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    REQUIRE(back.rows[i].measured_error == rep.rows[i].measured_error);
    REQUIRE(back.rows[i].seed == rep.rows[i].seed);
  }
  std::filesystem::remove(path);
}

TEST_CASE("absent slope serializes as absent") {
  RateReport rep = sample_report();
  rep.fitted_slope.reset();
  const std::string path = temp_path("rescade_test_noslope.json");
  rescade::emit_report(rep, path, ReportFormat::structured);
  const RateReport back = rescade::read_report(path, ReportFormat::structured);
  CHECK_FALSE(back.fitted_slope.has_value());
  std::filesystem::remove(path);
}

TEST_CASE("slope fit recovers planted power laws") {
  // error = 4 * N^-2  ->  slope -2 against log N.
  std::vector<RateRow> rows;
  for (double n : {2.0, 4.0, 8.0, 16.0})
    rows.push_back({n, 4.0 * std::pow(n, -2.0), 0.0, 0});
  const auto slope = rescade::fit_loglog_slope(rows, /*linear_axis=*/false);
  REQUIRE(slope.has_value());
  CHECK(*slope == doctest::Approx(-2.0).epsilon(1e-12));

  // error = exp(-0.5 l)  ->  slope -0.5 against the raw axis.
  std::vector<RateRow> lin;
  for (double l : {1.0, 2.0, 3.0, 4.0})
    lin.push_back({l, std::exp(-0.5 * l), 0.0, 0});
  const auto lslope = rescade::fit_loglog_slope(lin, /*linear_axis=*/true);
  REQUIRE(lslope.has_value());
  CHECK(*lslope == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("slope fit ignores noise-floor rows and small samples") {
  std::vector<RateRow> rows;
  for (double n : {2.0, 4.0, 8.0})
    rows.push_back({n, 1.0 * std::pow(n, -1.0), 0.0, 0});
  const auto base_slope = rescade::fit_loglog_slope(rows, false);
  REQUIRE(base_slope.has_value());

  // A row at the numeric floor must not drag the fit.
  std::vector<RateRow> with_floor = rows;
  with_floor.push_back({16.0, 1e-13, 0.0, 0});
  const auto filtered = rescade::fit_loglog_slope(with_floor, false);
  REQUIRE(filtered.has_value());
  CHECK(*filtered == doctest::Approx(*base_slope).epsilon(1e-12));

  // Fewer than three usable rows: no slope.
  std::vector<RateRow> two = {rows[0], rows[1]};
  CHECK_FALSE(rescade::fit_loglog_slope(two, false).has_value());
}

TEST_CASE("emit validates row ordering and values") {
  RateReport rep = sample_report();
  std::swap(rep.rows[0], rep.rows[2]);  // axis no longer ascending
  const std::string path = temp_path("rescade_test_bad.csv");
  CHECK_THROWS_AS(rescade::emit_report(rep, path, ReportFormat::csv),
                  rescade::InvalidArgumentError);

  RateReport neg = sample_report();
  neg.rows[1].measured_error = -1.0;
  CHECK_THROWS_AS(rescade::emit_report(neg, path, ReportFormat::csv),
                  rescade::InvalidArgumentError);
}

TEST_CASE("reading bad inputs raises io errors") {
  CHECK_THROWS_AS(
      rescade::read_report(temp_path("rescade_does_not_exist.csv"),
                           ReportFormat::csv),
      rescade::IoError);

  const std::string path = temp_path("rescade_test_garbage.csv");
  std::ofstream(path) << "not,a,report\n1,2\n";
  CHECK_THROWS_AS(rescade::read_report(path, ReportFormat::csv),
                  rescade::IoError);
  std::filesystem::remove(path);
}

TEST_CASE("format parser accepts the two formats") {
  CHECK(rescade::parse_report_format("csv") == ReportFormat::csv);
  CHECK(rescade::parse_report_format("structured") == ReportFormat::structured);
  CHECK_THROWS_AS(rescade::parse_report_format("xml"),
                  rescade::InvalidArgumentError);
}
