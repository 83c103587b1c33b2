#include "rescade/layernet.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <set>
#include <string>

#include "rescade/errors.hpp"
#include "rescade/hilbert.hpp"
#include "rescade/rng.hpp"

namespace rescade {

namespace {

constexpr double kPreActivationBand = 4.0;
constexpr int kConstructionRetries = 64;

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMatrix> matrix_view(const LayerMap& layer) {
  return Eigen::Map<const RowMatrix>(layer.matrix.data(), layer.out_dim,
                                     layer.in_dim);
}

// Thin-SVD pseudo-inverse of the layer matrix. Certification only.
Eigen::MatrixXd pseudo_inverse(const LayerMap& layer, double* min_singular) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      matrix_view(layer), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (min_singular) *min_singular = sv(sv.size() - 1);
  Eigen::VectorXd inv = sv;
  for (Eigen::Index i = 0; i < inv.size(); ++i)
    inv(i) = sv(i) > 0.0 ? 1.0 / sv(i) : 0.0;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

// act^{-1} with the saturation check shared by reconstruct/verify.
double safe_inverse(const Activation& act, double y, int component) {
  double lo, hi;
  act.range(&lo, &hi);
  if (!(y > lo && y < hi))
    throw CertificationError("feature component " + std::to_string(component) +
                             " sits on the activation saturation boundary; "
                             "inverse undefined");
  return act.inverse(y);
}

}  // namespace

void LayerMap::apply(std::span<const double> x, std::span<double> out) const {
  const double* a = matrix.data();
  for (int r = 0; r < out_dim; ++r, a += in_dim) {
    double z = bias[r];
    for (int i = 0; i < in_dim; ++i) z += a[i] * x[i];
    out[r] = activation.value(z);
  }
}

std::vector<double> LayerMap::apply(std::span<const double> x) const {
  std::vector<double> out(out_dim);
  apply(x, out);
  return out;
}

std::vector<double> LayerMap::reconstruct(
    std::span<const double> features) const {
  if (static_cast<int>(features.size()) != out_dim)
    throw InvalidArgumentError("feature vector size does not match the map");
  Eigen::VectorXd z(out_dim);
  for (int r = 0; r < out_dim; ++r)
    z(r) = safe_inverse(activation, features[r], r) - bias[r];
  const Eigen::MatrixXd pinv = pseudo_inverse(*this, nullptr);
  Eigen::VectorXd x = pinv * z;
  return std::vector<double>(x.data(), x.data() + x.size());
}

Grid certification_grid(int in_dim) {
  // Dense enough to probe the box, small enough to keep SVD+round-trips
  // instant: ~256..1300 points regardless of dimension.
  int p = 3;
  switch (in_dim) {
    case 1: p = 257; break;
    case 2: p = 17; break;
    case 3: p = 9; break;
    case 4: p = 5; break;
    case 5: p = 4; break;
    default: p = 3; break;
  }
  return Grid::uniform(in_dim, p);
}

LayerMap make_invertible_layer(int in_dim, int out_dim, std::uint64_t seed,
                               double tau, Activation act) {
  if (in_dim < 1) throw InvalidArgumentError("layer map needs in_dim >= 1");
  if (out_dim < in_dim)
    throw InvalidArgumentError(
        "layer map needs out_dim >= in_dim to be injective");
  if (!act.bounded_invertible())
    throw InvalidArgumentError(
        std::string(act.name()) +
        " has no bounded inverse; layer maps require logistic or tanh");
  if (!(tau > 0.0))
    throw InvalidArgumentError("singular value floor must be positive");

  for (int attempt = 0; attempt < kConstructionRetries; ++attempt) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    LayerMap layer;
    layer.in_dim = in_dim;
    layer.out_dim = out_dim;
    layer.activation = act;
    layer.matrix.resize(static_cast<std::size_t>(out_dim) * in_dim);
    layer.bias.resize(out_dim);
    for (int r = 0; r < out_dim; ++r) {
      double* row = layer.matrix.data() + static_cast<std::size_t>(r) * in_dim;
      for (int i = 0; i < in_dim; ++i) row[i] = rng.uniform(-1.0, 1.0);
      layer.bias[r] = rng.uniform(-1.0, 1.0);
    }
    // Scale each row so the pre-activation over [-1,1]^{in_dim} stays inside
    // the invertible band: |z_r| <= sum |a_ri| + |b_r|.
    for (int r = 0; r < out_dim; ++r) {
      double* row = layer.matrix.data() + static_cast<std::size_t>(r) * in_dim;
      double reach = std::fabs(layer.bias[r]);
      for (int i = 0; i < in_dim; ++i) reach += std::fabs(row[i]);
      if (reach > kPreActivationBand) {
        const double s = kPreActivationBand / reach;
        for (int i = 0; i < in_dim; ++i) row[i] *= s;
        layer.bias[r] *= s;
      }
    }

    double min_sv = 0.0;
    const Eigen::MatrixXd pinv = pseudo_inverse(layer, &min_sv);
    if (min_sv < tau) continue;  // rank too weak after scaling; redraw

    // Certify: round-trip the default grid through act^{-1} and the
    // pseudo-inverse.
    const Grid grid = certification_grid(in_dim);
    double worst = 0.0;
    std::vector<double> feat(out_dim);
    grid.for_each([&](std::size_t, std::span<const double> x) {
      layer.apply(x, feat);
      Eigen::VectorXd z(out_dim);
      for (int r = 0; r < out_dim; ++r)
        z(r) = safe_inverse(act, feat[r], r) - layer.bias[r];
      const Eigen::VectorXd xr = pinv * z;
      double err2 = 0.0;
      for (int i = 0; i < in_dim; ++i) {
        const double d = xr(i) - x[i];
        err2 += d * d;
      }
      const double err = std::sqrt(err2);
      if (err > worst) worst = err;
    });

    layer.certificate.min_singular_value = min_sv;
    layer.certificate.reconstruction_error = worst;
    return layer;
  }
  throw CertificationError(
      "no random draw reached min singular value " + std::to_string(tau) +
      " within " + std::to_string(kConstructionRetries) +
      " attempts; the requested shape/floor looks pathological");
}

VerifyResult verify_invertibility(const LayerMap& layer, const Grid& grid,
                                  double tol) {
  if (grid.dims() != layer.in_dim)
    throw InvalidArgumentError("grid dimension does not match the map");
  double min_sv = 0.0;
  const Eigen::MatrixXd pinv = pseudo_inverse(layer, &min_sv);
  double worst = 0.0;
  std::vector<double> feat(layer.out_dim);
  grid.for_each([&](std::size_t, std::span<const double> x) {
    layer.apply(x, feat);
    Eigen::VectorXd z(layer.out_dim);
    for (int r = 0; r < layer.out_dim; ++r)
      z(r) = safe_inverse(layer.activation, feat[r], r) - layer.bias[r];
    const Eigen::VectorXd xr = pinv * z;
    double err2 = 0.0;
    for (int i = 0; i < layer.in_dim; ++i) {
      const double d = xr(i) - x[i];
      err2 += d * d;
    }
    const double err = std::sqrt(err2);
    if (err > worst) worst = err;
  });
  VerifyResult out;
  out.certificate.min_singular_value = min_sv;
  out.certificate.reconstruction_error = worst;
  out.passed = worst <= tol;
  return out;
}

namespace {

void validate_chain(const std::vector<LayerMap>& chain, int depth, int in_dim,
                    int width) {
  if (static_cast<int>(chain.size()) != depth)
    throw InvalidArgumentError("chain length does not match depth");
  for (int j = 0; j < depth; ++j) {
    const LayerMap& g = chain[j];
    const int expect_in = j == 0 ? in_dim : width;
    if (g.in_dim != expect_in || g.out_dim != width)
      throw InvalidArgumentError("chain map " + std::to_string(j + 1) +
                                 " has shape " + std::to_string(g.in_dim) +
                                 "->" + std::to_string(g.out_dim) +
                                 ", expected " + std::to_string(expect_in) +
                                 "->" + std::to_string(width));
    if (!g.activation.bounded_invertible())
      throw InvalidArgumentError("chain map " + std::to_string(j + 1) +
                                 " uses a non-invertible activation");
  }
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

LayerNetTraining train_layernet_ge(const Oracle& f, const Grid& grid,
                                   int depth, int width, const FitConfig& cfg,
                                   double tau, std::vector<LayerMap> chain) {
  if (depth < 1) throw InvalidArgumentError("depth must be >= 1");
  const int n = grid.dims();
  if (width < n)
    throw InvalidArgumentError(
        "width " + std::to_string(width) + " is below the input dimension " +
        std::to_string(n) + "; use the reduced-input trainer for that regime");

  if (chain.empty()) {
    chain.reserve(depth);
    chain.push_back(make_invertible_layer(
        n, width, derive_seed(cfg.rng_seed, 1000 + 1), tau));
    for (int j = 2; j <= depth; ++j)
      chain.push_back(make_invertible_layer(
          width, width, derive_seed(cfg.rng_seed, 1000 + j), tau));
  } else {
    validate_chain(chain, depth, n, width);
  }

  const std::size_t count = grid.size();
  std::vector<double> y(count);
  std::vector<double> state(count * static_cast<std::size_t>(width));
  double sup_f = 0.0;
  {
    std::vector<double> row(width);
    grid.for_each([&](std::size_t i, std::span<const double> x) {
      const double v = f(x);
      if (!std::isfinite(v))
        throw InvalidOracleError(
            "target produced a non-finite value at grid index " +
            std::to_string(i));
      y[i] = v;
      if (std::fabs(v) > sup_f) sup_f = std::fabs(v);
      chain[0].apply(x, row);
      for (int r = 0; r < width; ++r) state[i * width + r] = row[r];
    });
  }
  if (sup_f > 1.0)
    throw InvalidArgumentError(
        "target has grid sup norm > 1; rescale it before training");

  LayerNetTraining out;
  LayerNetModel& model = out.model;
  model.input_dim = n;
  model.width = width;
  model.chain = std::move(chain);

  // Stage 1 reads the chain state after G_1 and fits f directly.
  FitConfig stage_cfg = cfg;
  stage_cfg.rng_seed = derive_seed(cfg.rng_seed, 1);
  FitResult fit1 = fit_table(state, width, y, width, stage_cfg);
  std::vector<double> stage_out(count);
  for (std::size_t p = 0; p < count; ++p)
    stage_out[p] = fit1.net.eval(
        std::span<const double>(state.data() + p * width, width));
  double err = table_sup_abs_diff(y, stage_out);
  if (err >= sup_f && sup_f > 0.0) {
    fit1.net = ShallowNet::zeros(width, width, fit1.net.activation);
    for (std::size_t p = 0; p < count; ++p)
      stage_out[p] = fit1.net.eval(
          std::span<const double>(state.data() + p * width, width));
    err = table_sup_abs_diff(y, stage_out);
  }
  model.stages.push_back(fit1.net);
  model.initial_error = err;
  out.trace.per_layer.push_back(err);
  out.trace.cumulative.push_back(err);
  if (err < 1e-12) return out;

  std::vector<double> residual(count);
  for (std::size_t p = 0; p < count; ++p)
    residual[p] = (y[p] - stage_out[p]) / err;
  double cum = err;

  std::vector<double> next(width);
  for (int j = 2; j <= depth; ++j) {
    // Advance the chain state through G_j.
    for (std::size_t p = 0; p < count; ++p) {
      model.chain[j - 1].apply(
          std::span<const double>(state.data() + p * width, width), next);
      for (int r = 0; r < width; ++r) state[p * width + r] = next[r];
    }

    stage_cfg.rng_seed = derive_seed(cfg.rng_seed, static_cast<std::uint64_t>(j));
    FitResult fit = fit_table(state, width, residual, width, stage_cfg);
    for (std::size_t p = 0; p < count; ++p)
      stage_out[p] = fit.net.eval(
          std::span<const double>(state.data() + p * width, width));
    double e = table_sup_abs_diff(residual, stage_out);
    if (e >= 1.0) {
      fit.net = ShallowNet::zeros(width, width, fit.net.activation);
      for (std::size_t p = 0; p < count; ++p)
        stage_out[p] = fit.net.eval(
            std::span<const double>(state.data() + p * width, width));
      e = table_sup_abs_diff(residual, stage_out);
    }
    model.stages.push_back(fit.net);
    model.scales.push_back(e);
    out.trace.per_layer.push_back(e);
    cum *= e;
    out.trace.cumulative.push_back(cum);
    if (e < 1e-12) return out;
    for (std::size_t p = 0; p < count; ++p)
      residual[p] = (residual[p] - stage_out[p]) / e;
  }
  return out;
}

double eval_layernet(const LayerNetModel& model, std::span<const double> x) {
  return eval_layernet_prefix(model, x, model.depth());
}

double eval_layernet_prefix(const LayerNetModel& model,
                            std::span<const double> x, int depth) {
  if (depth < 1 || depth > model.depth())
    throw InvalidArgumentError("prefix depth out of range");
  if (static_cast<int>(x.size()) != model.input_dim)
    throw InvalidArgumentError("point dimension does not match the model");

  std::vector<double> state;
  if (model.reduction) {
    const std::vector<double> z =
        project_coords(x, model.reduction->collapsed_dims,
                       model.reduction->level);
    state = model.chain[0].apply(z);
  } else {
    state = model.chain[0].apply(x);
  }

  double composite = model.stages[0].eval(state);
  double mult = model.initial_error;
  for (int j = 2; j <= depth; ++j) {
    state = model.chain[j - 1].apply(state);
    composite += mult * model.stages[j - 1].eval(state);
    if (j - 2 < static_cast<int>(model.scales.size()))
      mult *= model.scales[j - 2];
  }
  return composite;
}

LayerNetReduced train_layernet_lt(const TargetFunction& f, const Grid& grid,
                                  int depth, int width, int level,
                                  const FitConfig& cfg, double tau) {
  const int n = grid.dims();
  if (f.dims != n)
    throw InvalidArgumentError("function dimension does not match the grid");
  if (width < 1 || width > n)
    throw InvalidArgumentError(
        "reduced-input training needs 1 <= width <= input dimension " +
        std::to_string(n));
  const int d = n - width + 1;
  // Validates level >= 1 and d*level against the embedding bit budget.
  embed_index(HilbertIndex{0, d, level});

  // Collapsed axis of the reduced grid: every embedding scalar reachable by
  // snapping a combination of the original grid's first d axes. Projected
  // grid points then land exactly on reduced grid points, which is what makes
  // the triangle split below hold without slack beyond float noise.
  std::set<std::uint64_t> cells;
  {
    std::vector<std::size_t> digit(d, 0);
    std::vector<double> unit(d);
    std::size_t combos = 1;
    for (int a = 0; a < d; ++a) combos *= grid.axis_size(a);
    for (std::size_t c = 0; c < combos; ++c) {
      for (int a = 0; a < d; ++a) {
        const double x = grid.axis(a)[digit[a]];
        if (!(x >= -1.0 && x <= 1.0))
          throw InvalidArgumentError("grid axis value outside [-1,1]");
        unit[a] = (x + 1.0) / 2.0;
      }
      cells.insert(snap_point(unit, level).first.value);
      for (int a = d - 1; a >= 0; --a) {
        if (++digit[a] < grid.axis_size(a)) break;
        digit[a] = 0;
      }
    }
  }
  std::vector<std::vector<double>> axes;
  axes.reserve(width);
  {
    std::vector<double> scalars;
    scalars.reserve(cells.size());
    for (const std::uint64_t v : cells)
      scalars.push_back(embed_index(HilbertIndex{v, d, level}));
    axes.push_back(std::move(scalars));
  }
  for (int a = d; a < n; ++a) axes.push_back(grid.axis(a));
  const Grid reduced = Grid::from_axes(std::move(axes));

  const Oracle& orig = f.oracle;
  Oracle reduced_oracle = [&orig, d, level, n](std::span<const double> z) {
    const std::vector<double> x = lift_coords(z, d, level, n);
    return orig(x);
  };

  LayerNetTraining trained =
      train_layernet_ge(reduced_oracle, reduced, depth, width, cfg, tau);

  LayerNetReduced out;
  out.model = std::move(trained.model);
  out.trace = std::move(trained.trace);
  out.model.input_dim = n;
  out.model.reduction = HilbertReduction{d, level};

  BoundReport& report = out.report;
  if (f.lipschitz) {
    report.lipschitz_used = *f.lipschitz;
    report.lipschitz_source = "analytic";
  } else {
    report.lipschitz_used = estimate_lipschitz(orig, grid);
    report.lipschitz_source = "estimated";
  }
  report.projection_term_unit =
      report.lipschitz_used * std::sqrt(static_cast<double>(d)) *
      std::ldexp(1.0, -(level + 1));
  report.projection_term_scaled = 2.0 * report.projection_term_unit;
  report.reduced_error = out.trace.cumulative.back();
  report.total_measured = sup_norm_diff(
      orig,
      [&](std::span<const double> x) { return eval_layernet(out.model, x); },
      grid);

  if (report.total_measured >
      report.projection_term_scaled + report.reduced_error + 1e-6)
    throw TrainingFaultError(
        "triangle split failed: total " + std::to_string(report.total_measured) +
        " > projection " + std::to_string(report.projection_term_scaled) +
        " + reduced " + std::to_string(report.reduced_error) + " + 1e-6");
  return out;
}

}  // namespace rescade
