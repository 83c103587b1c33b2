#include "rescade/study.hpp"

#include <chrono>
#include <string>

#include "rescade/errors.hpp"

namespace rescade {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

Grid study_grid(const TargetFunction& f, const StudyOptions& opt) {
  const int p = opt.grid_points > 0 ? opt.grid_points
                                    : default_grid_points(f.dims);
  return Grid::uniform(f.dims, p);
}

void echo_common(RateReport& report, const TargetFunction& f,
                 const StudyOptions& opt, int grid_points) {
  auto& echo = report.config_echo;
  echo["function"] = f.name;
  echo["grid_points"] = std::to_string(grid_points);
  echo["seed"] = std::to_string(opt.fit.rng_seed);
  echo["restarts"] = std::to_string(opt.fit.restarts);
  echo["iterations"] = std::to_string(opt.fit.iterations);
  echo["step_size"] = format_double(opt.fit.step_size);
  echo["step_decay"] = format_double(opt.fit.step_decay);
  echo["init_scale"] = format_double(opt.fit.init_scale);
  echo["train_samples"] = std::to_string(opt.fit.train_samples);
  echo["record_timings"] = opt.record_timings ? "1" : "0";
}

std::string join_ints(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

void require_increasing(const std::vector<int>& values, const char* what) {
  if (values.empty())
    throw InvalidArgumentError(std::string(what) + " list is empty");
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] <= values[i - 1])
      throw InvalidArgumentError(std::string(what) +
                                 " list must be strictly increasing");
}

}  // namespace

RateReport rate_study_shallow(const TargetFunction& f,
                              const std::vector<int>& widths,
                              const StudyOptions& opt) {
  require_increasing(widths, "width");
  const Grid grid = study_grid(f, opt);

  RateReport report;
  report.function_name = f.name;
  report.dims = f.dims;
  report.smoothness = f.smoothness;
  report.axis = "width_N";
  echo_common(report, f, opt, static_cast<int>(grid.axis_size(0)));
  report.config_echo["axis"] = report.axis;
  report.config_echo["widths"] = join_ints(widths);

  ShallowNet warm;
  bool have_warm = false;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    FitConfig cfg = opt.fit;
    cfg.rng_seed = opt.fit.rng_seed + i;
    const auto start = Clock::now();
    try {
      const FitResult fit =
          fit_shallow(f.oracle, grid, widths[i], cfg,
                      Activation(ActivationKind::tanh),
                      have_warm ? &warm : nullptr);
      RateRow row;
      row.axis_value = static_cast<double>(widths[i]);
      row.measured_error = fit.sup_error;
      row.runtime_ms = opt.record_timings ? elapsed_ms(start) : 0.0;
      row.seed = cfg.rng_seed;
      report.rows.push_back(row);
      warm = fit.net;
      have_warm = true;
    } catch (const TrainingFaultError&) {
      report.failed_axis_values.push_back(static_cast<double>(widths[i]));
    }
  }
  report.fitted_slope = fit_loglog_slope(report.rows, /*linear_axis=*/false);
  return report;
}

RateReport depth_study(const TargetFunction& f, int max_depth, int width,
                       FeatureMode mode, const StudyOptions& opt) {
  if (max_depth < 2)
    throw InvalidArgumentError("depth study needs max_depth >= 2");
  if (width < 1) throw InvalidArgumentError("width must be >= 1");
  const Grid grid = study_grid(f, opt);

  RateReport report;
  report.function_name = f.name;
  report.dims = f.dims;
  report.smoothness = f.smoothness;
  report.axis = "depth_l";
  echo_common(report, f, opt, static_cast<int>(grid.axis_size(0)));
  report.config_echo["axis"] = report.axis;
  report.config_echo["depth"] = std::to_string(max_depth);
  report.config_echo["width"] = std::to_string(width);
  report.config_echo["mode"] = feature_mode_name(mode);

  const auto start = Clock::now();
  const CascadeTraining run =
      train_cascade(f.oracle, grid, max_depth, width, mode, opt.fit);
  const double ms = opt.record_timings ? elapsed_ms(start) : 0.0;

  // One deep run yields every row: the depth-l prefix of the cascade is
  // itself the depth-l model, and its grid error is cumulative[l-1].
  for (std::size_t l = 0; l < run.trace.cumulative.size(); ++l) {
    RateRow row;
    row.axis_value = static_cast<double>(l + 1);
    row.measured_error = run.trace.cumulative[l];
    row.runtime_ms = ms;  // cost of the shared run
    row.seed = opt.fit.rng_seed;
    report.rows.push_back(row);
  }
  report.fitted_slope = fit_loglog_slope(report.rows, /*linear_axis=*/true);
  return report;
}

RateReport hilbert_k_study(const TargetFunction& f, int width,
                           const std::vector<int>& levels, int depth,
                           const StudyOptions& opt) {
  require_increasing(levels, "level");
  if (depth < 1) throw InvalidArgumentError("depth must be >= 1");
  const Grid grid = study_grid(f, opt);

  RateReport report;
  report.function_name = f.name;
  report.dims = f.dims;
  report.smoothness = f.smoothness;
  report.axis = "hilbert_k";
  echo_common(report, f, opt, static_cast<int>(grid.axis_size(0)));
  report.config_echo["axis"] = report.axis;
  report.config_echo["levels"] = join_ints(levels);
  report.config_echo["depth"] = std::to_string(depth);
  report.config_echo["width"] = std::to_string(width);
  report.config_echo["tau"] = format_double(opt.tau);

  for (std::size_t i = 0; i < levels.size(); ++i) {
    FitConfig cfg = opt.fit;
    cfg.rng_seed = opt.fit.rng_seed + i;
    const auto start = Clock::now();
    try {
      const LayerNetReduced run =
          train_layernet_lt(f, grid, depth, width, levels[i], cfg, opt.tau);
      RateRow row;
      row.axis_value = static_cast<double>(levels[i]);
      row.measured_error = run.report.total_measured;
      row.runtime_ms = opt.record_timings ? elapsed_ms(start) : 0.0;
      row.seed = cfg.rng_seed;
      report.rows.push_back(row);
      report.projection_term_unit.push_back(run.report.projection_term_unit);
      report.projection_term_scaled.push_back(
          run.report.projection_term_scaled);
    } catch (const TrainingFaultError&) {
      report.failed_axis_values.push_back(static_cast<double>(levels[i]));
    }
  }
  report.fitted_slope = fit_loglog_slope(report.rows, /*linear_axis=*/false);
  return report;
}

}  // namespace rescade
