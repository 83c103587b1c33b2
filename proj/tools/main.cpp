#include <CLI11.hpp>

#include <cctype>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "rescade/cascade.hpp"
#include "rescade/corpus.hpp"
#include "rescade/errors.hpp"
#include "rescade/grid.hpp"
#include "rescade/hilbert.hpp"
#include "rescade/layernet.hpp"
#include "rescade/report.hpp"
#include "rescade/serialize.hpp"
#include "rescade/shallow.hpp"
#include "rescade/study.hpp"

namespace {

using namespace rescade;

// Stable exit codes per error category, so scripts can branch without
// parsing the message. 1 is CLI11's own usage-error code.
int exit_code_for(const std::string& category) {
  if (category == "invalid_argument") return 2;
  if (category == "io_error") return 3;
  if (category == "resource_exhausted") return 4;
  if (category == "invalid_oracle") return 5;
  if (category == "training_fault") return 6;
  if (category == "certification_failure") return 7;
  if (category == "unsupported_precision") return 8;
  if (category == "exact_fit_degeneracy") return 9;
  return 10;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : text) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  for (const std::string& tok : split_list(text)) {
    try {
      std::size_t pos = 0;
      const int v = std::stoi(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw InvalidArgumentError(std::string("bad ") + what + " entry '" +
                                 tok + "'");
    }
  }
  if (out.empty())
    throw InvalidArgumentError(std::string(what) + " list is empty");
  return out;
}

// Primary artifact sink: --out FILE, or stdout for "" / "-".
void sink_text(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + out_path + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + out_path + "'");
}

// report.csv -> report-tanh2x.csv when one invocation emits several reports.
std::string suffixed_path(const std::string& base, const std::string& name) {
  const std::size_t slash = base.find_last_of('/');
  const std::size_t dot = base.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return base + "-" + name;
  return base.substr(0, dot) + "-" + name + base.substr(dot);
}

std::string trace_to_csv(const ErrorTrace& trace) {
  std::string out = "layer,per_layer_error,cumulative_error\n";
  for (std::size_t l = 0; l < trace.per_layer.size(); ++l) {
    out += std::to_string(l + 1);
    out += ',';
    out += format_double(trace.per_layer[l]);
    out += ',';
    out += format_double(trace.cumulative[l]);
    out += '\n';
  }
  return out;
}

std::string bound_report_text(const BoundReport& r, ReportFormat format) {
  if (format == ReportFormat::csv) {
    std::string out =
        "projection_term_unit,projection_term_scaled,reduced_error,"
        "total_measured,lipschitz_used,lipschitz_source\n";
    out += format_double(r.projection_term_unit) + "," +
           format_double(r.projection_term_scaled) + "," +
           format_double(r.reduced_error) + "," +
           format_double(r.total_measured) + "," +
           format_double(r.lipschitz_used) + "," + r.lipschitz_source + "\n";
    return out;
  }
  std::string out = "{\n";
  out += "  \"projection_term_unit\": " +
         format_double(r.projection_term_unit) + ",\n";
  out += "  \"projection_term_scaled\": " +
         format_double(r.projection_term_scaled) + ",\n";
  out += "  \"reduced_error\": " + format_double(r.reduced_error) + ",\n";
  out += "  \"total_measured\": " + format_double(r.total_measured) + ",\n";
  out += "  \"lipschitz_used\": " + format_double(r.lipschitz_used) + ",\n";
  out += "  \"lipschitz_source\": \"" + r.lipschitz_source + "\"\n";
  out += "}\n";
  return out;
}

struct GlobalOptions {
  std::uint64_t seed = 0;
  int grid_points = 0;  // 0 = per-dimension default
  std::string out;
  std::string format = "csv";
  bool timings = false;
};

void add_fit_options(CLI::App* cmd, FitConfig& fit) {
  cmd->add_option("--restarts", fit.restarts, "Random restarts")
      ->capture_default_str();
  cmd->add_option("--iterations", fit.iterations,
                  "Gradient iterations per restart")
      ->capture_default_str();
  cmd->add_option("--step-size", fit.step_size, "Initial gradient step")
      ->capture_default_str();
  cmd->add_option("--step-decay", fit.step_decay,
                  "Step decay rate: step/(1+t*decay)")
      ->capture_default_str();
  cmd->add_option("--init-scale", fit.init_scale,
                  "Uniform init range for inner weights/biases")
      ->capture_default_str();
  cmd->add_option("--train-samples", fit.train_samples,
                  "Stride-subsample size for the gradient loop (0 = full grid)")
      ->capture_default_str();
}

Grid grid_for(const TargetFunction& f, const GlobalOptions& global) {
  const int p = global.grid_points > 0 ? global.grid_points
                                       : default_grid_points(f.dims);
  return Grid::uniform(f.dims, p);
}

StudyOptions study_options(const GlobalOptions& global, const FitConfig& fit) {
  StudyOptions opt;
  opt.grid_points = global.grid_points;
  opt.fit = fit;
  opt.fit.rng_seed = global.seed;
  opt.record_timings = global.timings;
  return opt;
}

void emit_reports(const std::vector<RateReport>& reports,
                  const GlobalOptions& global) {
  const ReportFormat format = parse_report_format(global.format);
  if (global.out.empty() || global.out == "-") {
    std::string text;
    for (const RateReport& r : reports) {
      if (reports.size() > 1) text += "# " + r.function_name + "\n";
      text += report_to_string(r, format);
    }
    sink_text(global.out, text);
    return;
  }
  if (reports.size() == 1) {
    emit_report(reports.front(), global.out, format);
    return;
  }
  for (const RateReport& r : reports)
    emit_report(r, suffixed_path(global.out, r.function_name), format);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Layer-wise residual training of shallow networks, with "
      "space-filling-curve input reduction and invertibility-certified "
      "feature chains"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Read options from an INI file");

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Base RNG seed")
      ->capture_default_str();
  app.add_option("--grid-points", global.grid_points,
                 "Grid points per axis (0 = per-dimension default)")
      ->capture_default_str();
  app.add_option("--out", global.out, "Primary output file ('-' = stdout)");
  app.add_option("--format", global.format, "Report format: csv|structured")
      ->capture_default_str();
  app.add_flag("--timings", global.timings,
               "Record wall-clock runtime_ms in study rows (breaks "
               "byte-identical reruns)");

  // ---- corpus ----------------------------------------------------------
  CLI::App* corpus_cmd = app.add_subcommand("corpus", "Built-in targets");
  corpus_cmd->require_subcommand(1);
  CLI::App* corpus_list = corpus_cmd->add_subcommand("list", "List targets");

  // ---- hilbert ---------------------------------------------------------
  CLI::App* hilbert_cmd =
      app.add_subcommand("hilbert", "Space-filling-curve cell indexing");
  hilbert_cmd->require_subcommand(1);

  int hil_level = 1;
  int hil_dims = 1;
  std::vector<std::uint64_t> hil_coords;
  std::uint64_t hil_index = 0;
  std::vector<double> hil_point;

  CLI::App* hil_encode = hilbert_cmd->add_subcommand(
      "encode", "Cell coordinates -> curve index");
  hil_encode->add_option("--level,-k", hil_level, "Bits per axis")
      ->required();
  hil_encode->add_option("coords", hil_coords, "Cell coordinates")
      ->required()
      ->expected(-1);

  CLI::App* hil_decode =
      hilbert_cmd->add_subcommand("decode", "Curve index -> cell coordinates");
  hil_decode->add_option("--level,-k", hil_level, "Bits per axis")
      ->required();
  hil_decode->add_option("--dims,-d", hil_dims, "Axis count")->required();
  hil_decode->add_option("index", hil_index, "Curve index")->required();

  CLI::App* hil_snap = hilbert_cmd->add_subcommand(
      "snap", "Point of [0,1]^d -> curve index and cell center");
  hil_snap->add_option("--level,-k", hil_level, "Bits per axis")->required();
  hil_snap->add_option("point", hil_point, "Point components in [0,1]")
      ->required()
      ->expected(-1);

  // ---- fit-shallow -----------------------------------------------------
  FitConfig fit_defaults;
  std::string fn_name;
  std::string activation_name = "tanh";
  std::string model_out;
  int units = 8;

  CLI::App* fit_shallow_cmd = app.add_subcommand(
      "fit-shallow", "Fit one shallow network to a target on its grid");
  fit_shallow_cmd->add_option("--function", fn_name, "Target name")
      ->required();
  fit_shallow_cmd->add_option("--units", units, "Hidden units")
      ->capture_default_str();
  fit_shallow_cmd
      ->add_option("--activation", activation_name,
                   "logistic|tanh|softplus")
      ->capture_default_str();
  fit_shallow_cmd->add_option("--model-out", model_out, "Save the model here");
  FitConfig fs_fit = fit_defaults;
  add_fit_options(fit_shallow_cmd, fs_fit);

  // ---- fit-cascade -----------------------------------------------------
  int depth = 4;
  int width = 8;
  std::string mode_name = "x_only";

  CLI::App* fit_cascade_cmd = app.add_subcommand(
      "fit-cascade", "Layer-wise residual training; emits the error trace");
  fit_cascade_cmd->add_option("--function", fn_name, "Target name")
      ->required();
  fit_cascade_cmd->add_option("--depth", depth, "Stages")
      ->capture_default_str();
  fit_cascade_cmd->add_option("--width", width, "Units per stage")
      ->capture_default_str();
  fit_cascade_cmd
      ->add_option("--mode", mode_name,
                   "x_only|x_plus_prev_approx|x_plus_prev_layer")
      ->capture_default_str();
  fit_cascade_cmd->add_option("--model-out", model_out,
                              "Save the model here");
  FitConfig fc_fit = fit_defaults;
  add_fit_options(fit_cascade_cmd, fc_fit);

  // ---- fit-layernet ----------------------------------------------------
  double tau = kDefaultSingularFloor;
  int level = 0;

  CLI::App* fit_layernet_cmd = app.add_subcommand(
      "fit-layernet",
      "Residual training over an invertible feature chain; giving --level "
      "collapses leading input dimensions through the curve embedding");
  fit_layernet_cmd->add_option("--function", fn_name, "Target name")
      ->required();
  fit_layernet_cmd->add_option("--depth", depth, "Stages")
      ->capture_default_str();
  fit_layernet_cmd->add_option("--width", width, "Chain width / units")
      ->capture_default_str();
  fit_layernet_cmd->add_option("--level", level,
                               "Curve level k (selects reduced-input mode)");
  fit_layernet_cmd->add_option("--tau", tau, "Min singular value floor")
      ->capture_default_str();
  fit_layernet_cmd->add_option("--model-out", model_out,
                               "Save the model here");
  FitConfig fl_fit = fit_defaults;
  add_fit_options(fit_layernet_cmd, fl_fit);

  // ---- studies ---------------------------------------------------------
  std::string functions_arg = "all";
  std::string widths_arg = "2,4,8,16,32";
  std::string levels_arg = "2,3,4,5,6";

  CLI::App* rate_cmd = app.add_subcommand(
      "rate-study", "Error vs width, warm-started across widths");
  rate_cmd->add_option("--functions", functions_arg,
                       "Comma-separated target names, or 'all'")
      ->capture_default_str();
  rate_cmd->add_option("--widths", widths_arg,
                       "Comma-separated strictly increasing widths")
      ->capture_default_str();
  FitConfig rs_fit = fit_defaults;
  add_fit_options(rate_cmd, rs_fit);

  CLI::App* depth_cmd =
      app.add_subcommand("depth-study", "Error vs stages of one deep run");
  depth_cmd->add_option("--function", fn_name, "Target name")->required();
  depth_cmd->add_option("--depth", depth, "Maximum stages")
      ->capture_default_str();
  depth_cmd->add_option("--width", width, "Units per stage")
      ->capture_default_str();
  depth_cmd
      ->add_option("--mode", mode_name,
                   "x_only|x_plus_prev_approx|x_plus_prev_layer")
      ->capture_default_str();
  FitConfig ds_fit = fit_defaults;
  add_fit_options(depth_cmd, ds_fit);

  CLI::App* k_cmd = app.add_subcommand(
      "k-study", "Error vs curve level for reduced-input training");
  k_cmd->add_option("--function", fn_name, "Target name")->required();
  k_cmd->add_option("--levels", levels_arg,
                    "Comma-separated strictly increasing curve levels")
      ->capture_default_str();
  k_cmd->add_option("--width", width, "Chain width / units")
      ->capture_default_str();
  k_cmd->add_option("--depth", depth, "Stages")->capture_default_str();
  k_cmd->add_option("--tau", tau, "Min singular value floor")
      ->capture_default_str();
  FitConfig ks_fit = fit_defaults;
  add_fit_options(k_cmd, ks_fit);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (corpus_list->parsed()) {
      std::string text = "name dims smoothness lipschitz sup_scaled\n";
      for (const TargetFunction& f : builtin_corpus()) {
        text += f.name + " " + std::to_string(f.dims) + " " +
                std::to_string(f.smoothness) + " " +
                (f.lipschitz ? format_double(*f.lipschitz) : "-") + " " +
                (f.sobolev_scaled ? "yes" : "no") + "\n";
      }
      sink_text(global.out, text);
      return 0;
    }

    if (hil_encode->parsed()) {
      const CellCoord cell{static_cast<int>(hil_coords.size()), hil_level,
                           hil_coords};
      sink_text(global.out, std::to_string(hilbert_encode(cell).value) + "\n");
      return 0;
    }
    if (hil_decode->parsed()) {
      const CellCoord cell =
          hilbert_decode(HilbertIndex{hil_index, hil_dims, hil_level});
      std::string text;
      for (std::size_t i = 0; i < cell.coords.size(); ++i) {
        if (i) text += ' ';
        text += std::to_string(cell.coords[i]);
      }
      sink_text(global.out, text + "\n");
      return 0;
    }
    if (hil_snap->parsed()) {
      const auto snapped = snap_point(hil_point, hil_level);
      std::string text = std::to_string(snapped.first.value) + "\n";
      for (std::size_t i = 0; i < snapped.second.size(); ++i) {
        if (i) text += ' ';
        text += format_double(snapped.second[i]);
      }
      sink_text(global.out, text + "\n");
      return 0;
    }

    if (fit_shallow_cmd->parsed()) {
      const TargetFunction& f = find_function(fn_name);
      fs_fit.rng_seed = global.seed;
      const FitResult fit =
          fit_shallow(f.oracle, grid_for(f, global), units, fs_fit,
                      Activation::parse(activation_name));
      if (!model_out.empty()) save_shallow(fit.net, model_out);
      sink_text(global.out,
                "sup_error " + format_double(fit.sup_error) + "\n");
      return 0;
    }

    if (fit_cascade_cmd->parsed()) {
      const TargetFunction& f = find_function(fn_name);
      fc_fit.rng_seed = global.seed;
      const CascadeTraining run =
          train_cascade(f.oracle, grid_for(f, global), depth, width,
                        parse_feature_mode(mode_name), fc_fit);
      if (!model_out.empty()) save_cascade(run.model, model_out);
      sink_text(global.out, trace_to_csv(run.trace));
      return 0;
    }

    if (fit_layernet_cmd->parsed()) {
      const TargetFunction& f = find_function(fn_name);
      fl_fit.rng_seed = global.seed;
      const Grid grid = grid_for(f, global);
      if (fit_layernet_cmd->count("--level") > 0) {
        const LayerNetReduced run =
            train_layernet_lt(f, grid, depth, width, level, fl_fit, tau);
        if (!model_out.empty()) save_layernet(run.model, model_out);
        sink_text(global.out,
                  bound_report_text(run.report,
                                    parse_report_format(global.format)));
      } else {
        const LayerNetTraining run =
            train_layernet_ge(f.oracle, grid, depth, width, fl_fit, tau);
        if (!model_out.empty()) save_layernet(run.model, model_out);
        sink_text(global.out, trace_to_csv(run.trace));
      }
      return 0;
    }

    if (rate_cmd->parsed()) {
      std::vector<std::string> names;
      if (functions_arg == "all") {
        for (const TargetFunction& f : builtin_corpus())
          names.push_back(f.name);
      } else {
        names = split_list(functions_arg);
      }
      if (names.empty()) throw InvalidArgumentError("no functions selected");
      const std::vector<int> widths = parse_int_list(widths_arg, "width");
      std::vector<RateReport> reports;
      for (const std::string& name : names)
        reports.push_back(rate_study_shallow(
            find_function(name), widths, study_options(global, rs_fit)));
      emit_reports(reports, global);
      return 0;
    }

    if (depth_cmd->parsed()) {
      const RateReport report =
          depth_study(find_function(fn_name), depth, width,
                      parse_feature_mode(mode_name),
                      study_options(global, ds_fit));
      emit_reports({report}, global);
      return 0;
    }

    if (k_cmd->parsed()) {
      StudyOptions opt = study_options(global, ks_fit);
      opt.tau = tau;
      const RateReport report = hilbert_k_study(
          find_function(fn_name), width, parse_int_list(levels_arg, "level"),
          depth, opt);
      emit_reports({report}, global);
      return 0;
    }

    std::cerr << "error: invalid_argument: no subcommand selected\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.category() << ": " << e.what() << "\n";
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 10;
  }
}
