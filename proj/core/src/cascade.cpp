#include "rescade/cascade.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "rescade/errors.hpp"
#include "rescade/rng.hpp"

namespace rescade {

const char* feature_mode_name(FeatureMode mode) {
  switch (mode) {
    case FeatureMode::x_only:
      return "x_only";
    case FeatureMode::x_plus_prev_approx:
      return "x_plus_prev_approx";
    case FeatureMode::x_plus_prev_layer:
      return "x_plus_prev_layer";
  }
  return "?";
}

FeatureMode parse_feature_mode(const std::string& name) {
  if (name == "x_only") return FeatureMode::x_only;
  if (name == "x_plus_prev_approx") return FeatureMode::x_plus_prev_approx;
  if (name == "x_plus_prev_layer") return FeatureMode::x_plus_prev_layer;
  throw InvalidArgumentError(
      "unknown feature mode '" + name +
      "' (expected x_only, x_plus_prev_approx, or x_plus_prev_layer)");
}

int CascadeModel::feature_dim(int stage) const {
  if (stage < 1 || stage > depth())
    throw InvalidArgumentError("stage out of range");
  if (stage == 1) return input_dim;
  switch (mode) {
    case FeatureMode::x_only:
      return input_dim;
    case FeatureMode::x_plus_prev_approx:
      return input_dim + 1;
    case FeatureMode::x_plus_prev_layer:
      return input_dim + layers[stage - 2].units;
  }
  return input_dim;
}

namespace {

// Single forward pass through the first `depth` stages at one point. The
// composite, the stage features, and the stage outputs here are computed with
// exactly the same operation sequence as the training tables, so training
// errors and re-evaluated errors agree bit for bit. If `stage_outputs` is
// given it receives g_j(features_j(x)) for each stage.
double forward_point(const CascadeModel& m, std::span<const double> x,
                     int depth, std::vector<double>* stage_outputs) {
  std::vector<double> feat(x.begin(), x.end());
  std::vector<double> hidden;
  double composite = 0.0;
  double mult = m.initial_error;

  for (int j = 1; j <= depth; ++j) {
    const ShallowNet& net = m.layers[j - 1];
    if (j >= 2) {
      feat.assign(x.begin(), x.end());
      switch (m.mode) {
        case FeatureMode::x_only:
          break;
        case FeatureMode::x_plus_prev_approx:
          feat.push_back(composite);
          break;
        case FeatureMode::x_plus_prev_layer:
          feat.insert(feat.end(), hidden.begin(), hidden.end());
          break;
      }
    }
    if (static_cast<int>(feat.size()) != net.input_dim)
      throw InvalidArgumentError("stage " + std::to_string(j) +
                                 " feature width does not match the model");
    const double out = net.eval(feat);
    if (stage_outputs) stage_outputs->push_back(out);

    if (j == 1) {
      composite = out;
    } else {
      composite += mult * out;
      if (j - 2 < static_cast<int>(m.scales.size())) mult *= m.scales[j - 2];
    }
    if (m.mode == FeatureMode::x_plus_prev_layer && j < depth) {
      hidden.resize(net.units);
      net.hidden(feat, hidden);
    }
  }
  return composite;
}

double table_sup_abs_diff(std::span<const double> a,
                          std::span<const double> b) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::fabs(a[i] - b[i]);
    if (d > best) best = d;
  }
  return best;
}

}  // namespace

CascadeTraining train_cascade(const Oracle& f, const Grid& grid, int depth,
                              int width, FeatureMode mode,
                              const FitConfig& cfg, Activation act) {
  if (depth < 1) throw InvalidArgumentError("cascade depth must be >= 1");
  if (width < 1) throw InvalidArgumentError("cascade width must be >= 1");
  const int n = grid.dims();
  const std::size_t count = grid.size();

  std::vector<double> points(count * static_cast<std::size_t>(n));
  std::vector<double> y(count);
  double sup_f = 0.0;
  grid.for_each([&](std::size_t i, std::span<const double> x) {
    for (int a = 0; a < n; ++a) points[i * n + a] = x[a];
    const double v = f(x);
    if (!std::isfinite(v))
      throw InvalidOracleError("target produced a non-finite value at grid index " +
                               std::to_string(i));
    y[i] = v;
    if (std::fabs(v) > sup_f) sup_f = std::fabs(v);
  });
  if (sup_f > 1.0)
    throw InvalidArgumentError(
        "target has grid sup norm > 1; rescale it before cascade training");

  CascadeTraining out;
  CascadeModel& model = out.model;
  model.input_dim = n;
  model.mode = mode;

  // Stage 1: fit f directly. If the fit cannot beat the zero function, use
  // the zero function (mirrors the residual-stage safeguard below).
  FitConfig stage_cfg = cfg;
  stage_cfg.rng_seed = derive_seed(cfg.rng_seed, 1);
  FitResult fit1 = fit_table(points, n, y, width, stage_cfg, act);
  std::vector<double> stage_out(count);
  for (std::size_t p = 0; p < count; ++p)
    stage_out[p] = fit1.net.eval(
        std::span<const double>(points.data() + p * n, n));
  double err = table_sup_abs_diff(y, stage_out);
  if (err >= sup_f && sup_f > 0.0) {
    fit1.net = ShallowNet::zeros(n, width, act);
    for (std::size_t p = 0; p < count; ++p)
      stage_out[p] = fit1.net.eval(
          std::span<const double>(points.data() + p * n, n));
    err = table_sup_abs_diff(y, stage_out);
  }

  model.layers.push_back(fit1.net);
  model.initial_error = err;
  out.trace.per_layer.push_back(err);
  out.trace.cumulative.push_back(err);

  std::vector<double> composite = stage_out;  // running approximant table
  std::vector<double> residual(count);
  std::vector<double> hidden;  // hidden table of the previous stage

  if (err < 1e-12) return out;  // numerically exact already

  for (std::size_t p = 0; p < count; ++p)
    residual[p] = (y[p] - composite[p]) / err;
  // The division above makes the residual's grid sup norm exactly 1: at the
  // argmax it divides a value by its own magnitude.

  double cum = err;  // also the multiplier of the next stage's contribution

  if (mode == FeatureMode::x_plus_prev_layer) {
    hidden.resize(count * static_cast<std::size_t>(width));
    for (std::size_t p = 0; p < count; ++p)
      fit1.net.hidden(std::span<const double>(points.data() + p * n, n),
                      std::span<double>(hidden.data() + p * width, width));
  }

  for (int j = 2; j <= depth; ++j) {
    // Assemble this stage's feature table.
    int fdim = n;
    std::vector<double> feat_storage;
    std::span<const double> feat;
    switch (mode) {
      case FeatureMode::x_only:
        feat = points;
        break;
      case FeatureMode::x_plus_prev_approx: {
        fdim = n + 1;
        feat_storage.resize(count * static_cast<std::size_t>(fdim));
        for (std::size_t p = 0; p < count; ++p) {
          double* row = feat_storage.data() + p * fdim;
          for (int a = 0; a < n; ++a) row[a] = points[p * n + a];
          row[n] = composite[p];
        }
        feat = feat_storage;
        break;
      }
      case FeatureMode::x_plus_prev_layer: {
        const int prev_units = model.layers.back().units;
        fdim = n + prev_units;
        feat_storage.resize(count * static_cast<std::size_t>(fdim));
        for (std::size_t p = 0; p < count; ++p) {
          double* row = feat_storage.data() + p * fdim;
          for (int a = 0; a < n; ++a) row[a] = points[p * n + a];
          for (int k = 0; k < prev_units; ++k)
            row[n + k] = hidden[p * prev_units + k];
        }
        feat = feat_storage;
        break;
      }
    }

    stage_cfg.rng_seed = derive_seed(cfg.rng_seed, static_cast<std::uint64_t>(j));
    FitResult fit = fit_table(feat, fdim, residual, width, stage_cfg, act);
    stage_out.resize(count);
    for (std::size_t p = 0; p < count; ++p)
      stage_out[p] = fit.net.eval(
          std::span<const double>(feat.data() + p * fdim, fdim));
    double e = table_sup_abs_diff(residual, stage_out);

    if (e >= 1.0) {
      // The fit failed to beat the zero function on a residual whose sup is
      // exactly 1. Keep the zero stage so the composite is unchanged and the
      // recorded scale is exactly 1.
      fit.net = ShallowNet::zeros(fdim, width, act);
      for (std::size_t p = 0; p < count; ++p)
        stage_out[p] = fit.net.eval(
            std::span<const double>(feat.data() + p * fdim, fdim));
      e = table_sup_abs_diff(residual, stage_out);
    }

    model.layers.push_back(fit.net);
    model.scales.push_back(e);
    out.trace.per_layer.push_back(e);

    for (std::size_t p = 0; p < count; ++p)
      composite[p] += cum * stage_out[p];
    if (mode == FeatureMode::x_plus_prev_layer && j < depth) {
      hidden.resize(count * static_cast<std::size_t>(width));
      for (std::size_t p = 0; p < count; ++p)
        fit.net.hidden(
            std::span<const double>(feat.data() + p * fdim, fdim),
            std::span<double>(hidden.data() + p * width, width));
    }

    cum *= e;
    out.trace.cumulative.push_back(cum);

    if (e < 1e-12) return out;  // exact residual fit; stop here
    for (std::size_t p = 0; p < count; ++p)
      residual[p] = (residual[p] - stage_out[p]) / e;
  }

  out.final_residual = std::move(residual);
  return out;
}

double eval_cascade(const CascadeModel& model, std::span<const double> x) {
  return eval_cascade_prefix(model, x, model.depth());
}

double eval_cascade_prefix(const CascadeModel& model,
                           std::span<const double> x, int depth) {
  if (depth < 1 || depth > model.depth())
    throw InvalidArgumentError("prefix depth out of range");
  if (static_cast<int>(x.size()) != model.input_dim)
    throw InvalidArgumentError("point dimension does not match the model");
  return forward_point(model, x, depth, nullptr);
}

Oracle residual_oracle(const CascadeModel& model, Oracle f, int stages) {
  if (stages < 1 || stages > model.depth())
    throw InvalidArgumentError("stage count out of range");
  if (model.initial_error < 1e-12)
    throw ExactFitError("stage 1 fit is numerically exact; residual undefined");
  for (int s = 2; s <= stages; ++s)
    if (model.scales[s - 2] < 1e-12)
      throw ExactFitError("stage " + std::to_string(s) +
                          " fit is numerically exact; residual undefined");

  return [model, f = std::move(f), stages](std::span<const double> x) {
    std::vector<double> outs;
    outs.reserve(stages);
    forward_point(model, x, stages, &outs);
    double r = (f(x) - outs[0]) / model.initial_error;
    for (int s = 2; s <= stages; ++s)
      r = (r - outs[s - 1]) / model.scales[s - 2];
    return r;
  };
}

}  // namespace rescade
