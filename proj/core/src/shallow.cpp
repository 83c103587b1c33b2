#include "rescade/shallow.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "rescade/errors.hpp"
#include "rescade/rng.hpp"

namespace rescade {

ShallowNet ShallowNet::zeros(int input_dim, int units, Activation act) {
  if (input_dim < 1 || units < 1)
    throw InvalidArgumentError("network needs input_dim >= 1 and units >= 1");
  ShallowNet net;
  net.input_dim = input_dim;
  net.units = units;
  net.activation = act;
  net.outer.assign(units, 0.0);
  net.inner_bias.assign(units, 0.0);
  net.inner_weights.assign(static_cast<std::size_t>(units) * input_dim, 0.0);
  return net;
}

double ShallowNet::eval(std::span<const double> x) const {
  double acc = 0.0;
  const double* w = inner_weights.data();
  for (int k = 0; k < units; ++k, w += input_dim) {
    double z = inner_bias[k];
    for (int i = 0; i < input_dim; ++i) z += w[i] * x[i];
    acc += outer[k] * activation.value(z);
  }
  return acc;
}

void ShallowNet::hidden(std::span<const double> x,
                        std::span<double> out) const {
  const double* w = inner_weights.data();
  for (int k = 0; k < units; ++k, w += input_dim) {
    double z = inner_bias[k];
    for (int i = 0; i < input_dim; ++i) z += w[i] * x[i];
    out[k] = activation.value(z);
  }
}

ShallowNet pad_units(const ShallowNet& net, int target_units) {
  if (target_units < net.units)
    throw InvalidArgumentError("cannot pad a network down");
  ShallowNet out = net;
  out.units = target_units;
  out.outer.resize(target_units, 0.0);
  out.inner_bias.resize(target_units, 0.0);
  out.inner_weights.resize(
      static_cast<std::size_t>(target_units) * net.input_dim, 0.0);
  return out;
}

std::vector<double> grad_params(const ShallowNet& net,
                                std::span<const double> x, double weight) {
  const int n = net.input_dim;
  const int N = net.units;
  std::vector<double> g(net.parameter_count());
  double* ga = g.data();
  double* gb = ga + N;
  double* gw = gb + N;
  const double* w = net.inner_weights.data();
  for (int k = 0; k < N; ++k, w += n) {
    double z = net.inner_bias[k];
    for (int i = 0; i < n; ++i) z += w[i] * x[i];
    const double h = net.activation.value(z);
    const double hd = net.activation.derivative(z);
    ga[k] = weight * h;
    const double c = weight * net.outer[k] * hd;
    gb[k] = c;
    for (int i = 0; i < n; ++i) gw[static_cast<std::size_t>(k) * n + i] = c * x[i];
  }
  return g;
}

namespace {

// Flat parameter view over a net, in the canonical order.
struct ParamView {
  double* a;
  double* b;
  double* w;
};

double candidate_sup_error(const ShallowNet& net,
                           std::span<const double> points, int dim,
                           std::span<const double> targets) {
  const std::size_t count = targets.size();
  double best = 0.0;
  for (std::size_t p = 0; p < count; ++p) {
    const double v =
        net.eval(std::span<const double>(points.data() + p * dim, dim));
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    const double d = std::fabs(v - targets[p]);
    if (d > best) best = d;
  }
  return best;
}

// One gradient-descent run from the given starting net. Returns false if the
// loss went non-finite.
bool descend(ShallowNet& net, std::span<const double> points, int dim,
             std::span<const double> targets,
             std::span<const std::size_t> sample, const FitConfig& cfg) {
  const int N = net.units;
  const std::size_t count = sample.size();
  std::vector<double> grad(net.parameter_count());
  std::vector<double> h(N), hd(N);
  double* ga = grad.data();
  double* gb = ga + N;
  double* gw = gb + N;

  for (int t = 0; t < cfg.iterations; ++t) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (std::size_t s = 0; s < count; ++s) {
      const std::size_t p = sample[s];
      const double* xp = points.data() + p * dim;
      const double* w = net.inner_weights.data();
      double pred = 0.0;
      for (int k = 0; k < N; ++k, w += dim) {
        double z = net.inner_bias[k];
        for (int i = 0; i < dim; ++i) z += w[i] * xp[i];
        h[k] = net.activation.value(z);
        hd[k] = net.activation.derivative(z);
        pred += net.outer[k] * h[k];
      }
      const double e = pred - targets[p];
      loss += e * e;
      for (int k = 0; k < N; ++k) {
        ga[k] += e * h[k];
        const double c = e * net.outer[k] * hd[k];
        gb[k] += c;
        double* gwk = gw + static_cast<std::size_t>(k) * dim;
        const double* xq = points.data() + p * dim;
        for (int i = 0; i < dim; ++i) gwk[i] += c * xq[i];
      }
    }
    if (!std::isfinite(loss)) return false;
    const double mse = loss / static_cast<double>(count);
    if (mse < 1e-16) break;  // numerically exact fit
    const double lr = cfg.step_size / (1.0 + static_cast<double>(t) * cfg.step_decay);
    const double scale = 2.0 * lr / static_cast<double>(count);
    for (int k = 0; k < N; ++k) net.outer[k] -= scale * ga[k];
    for (int k = 0; k < N; ++k) net.inner_bias[k] -= scale * gb[k];
    double* wk = net.inner_weights.data();
    const double* gk = gw;
    const std::size_t wn = net.inner_weights.size();
    for (std::size_t i = 0; i < wn; ++i) wk[i] -= scale * gk[i];
  }
  return true;
}

}  // namespace

FitResult fit_table(std::span<const double> points, int point_dim,
                    std::span<const double> targets, int units,
                    const FitConfig& cfg, Activation act,
                    const ShallowNet* warm_start) {
  if (point_dim < 1 || units < 1)
    throw InvalidArgumentError("fit needs point_dim >= 1 and units >= 1");
  const std::size_t count = targets.size();
  if (count == 0 || points.size() != count * static_cast<std::size_t>(point_dim))
    throw InvalidArgumentError("point table and target sizes do not match");
  if (cfg.restarts < 1 || cfg.iterations < 0 || cfg.step_size <= 0.0 ||
      cfg.step_decay < 0.0)
    throw InvalidArgumentError("bad fit configuration");
  if (warm_start &&
      (warm_start->input_dim != point_dim || warm_start->units > units))
    throw InvalidArgumentError("warm start shape is incompatible");

  // Gradient loop may run on a deterministic stride subsample; selection
  // below always uses the full table.
  std::vector<std::size_t> sample;
  if (cfg.train_samples > 0 &&
      static_cast<std::size_t>(cfg.train_samples) < count) {
    const std::size_t m = static_cast<std::size_t>(cfg.train_samples);
    sample.resize(m);
    for (std::size_t j = 0; j < m; ++j) sample[j] = j * count / m;
  } else {
    sample.resize(count);
    for (std::size_t j = 0; j < count; ++j) sample[j] = j;
  }

  bool have_best = false;
  FitResult best;

  auto consider = [&](const ShallowNet& net) {
    const double sup = candidate_sup_error(net, points, point_dim, targets);
    if (!std::isfinite(sup)) return;
    if (!have_best || sup < best.sup_error) {
      best.net = net;
      best.sup_error = sup;
      have_best = true;
    }
  };

  for (int r = 0; r < cfg.restarts; ++r) {
    Rng rng(derive_seed(cfg.rng_seed, static_cast<std::uint64_t>(r)));
    ShallowNet net = ShallowNet::zeros(point_dim, units, act);
    for (int k = 0; k < units; ++k) {
      net.inner_bias[k] = rng.uniform(-cfg.init_scale, cfg.init_scale);
      for (int i = 0; i < point_dim; ++i)
        net.inner_weights[static_cast<std::size_t>(k) * point_dim + i] =
            rng.uniform(-cfg.init_scale, cfg.init_scale);
    }
    if (descend(net, points, point_dim, targets, sample, cfg)) consider(net);
  }

  if (warm_start) {
    ShallowNet padded = pad_units(*warm_start, units);
    padded.activation = warm_start->activation;
    ShallowNet net = padded;
    if (descend(net, points, point_dim, targets, sample, cfg)) consider(net);
    // The untouched warm start is itself a candidate, which makes width
    // sweeps monotone: growing the width can never report a worse sup error.
    consider(padded);
  }

  if (!have_best)
    throw TrainingFaultError("every restart diverged (" +
                             std::to_string(cfg.restarts) + " attempts)");
  return best;
}

FitResult fit_shallow(const Oracle& f, const Grid& grid, int units,
                      const FitConfig& cfg, Activation act,
                      const ShallowNet* warm_start) {
  const int dim = grid.dims();
  const std::size_t count = grid.size();
  std::vector<double> points(count * static_cast<std::size_t>(dim));
  std::vector<double> targets(count);
  grid.for_each([&](std::size_t i, std::span<const double> x) {
    for (int a = 0; a < dim; ++a) points[i * dim + a] = x[a];
    const double v = f(x);
    if (!std::isfinite(v))
      throw InvalidOracleError("target produced a non-finite value at grid index " +
                               std::to_string(i));
    targets[i] = v;
  });
  return fit_table(points, dim, targets, units, cfg, act, warm_start);
}

}  // namespace rescade
