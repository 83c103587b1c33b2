#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rescade/activation.hpp"
#include "rescade/grid.hpp"

namespace rescade {

// One hidden layer of `units` smooth neurons with a linear read-out:
//   F(x) = sum_k outer[k] * act(inner_bias[k] + <weights row k, x>).
// Parameter count is (input_dim + 2) * units.
struct ShallowNet {
  int input_dim = 0;
  int units = 0;
  Activation activation;
  std::vector<double> outer;           // size units
  std::vector<double> inner_bias;      // size units
  std::vector<double> inner_weights;   // units x input_dim, row-major

  static ShallowNet zeros(int input_dim, int units, Activation act);

  int parameter_count() const { return (input_dim + 2) * units; }

  double eval(std::span<const double> x) const;

  // Hidden activations act(z_k) for all units into out (size units).
  void hidden(std::span<const double> x, std::span<double> out) const;
};

// Append zero units (outer = bias = weights = 0). The padded net evaluates
// bit-identically to the original; this is what width sweeps warm-start from.
ShallowNet pad_units(const ShallowNet& net, int target_units);

// d eval / d theta at x, times `weight`, in the canonical parameter order
// [outer..., inner_bias..., inner_weights row-major...] (the same order the
// serializer writes).
std::vector<double> grad_params(const ShallowNet& net,
                                std::span<const double> x,
                                double weight = 1.0);

// Full-batch gradient descent on grid MSE with random restarts; the returned
// candidate minimizes the *sup* error over the grid. Deterministic given
// rng_seed.
struct FitConfig {
  std::uint64_t rng_seed = 0;
  int restarts = 8;
  int iterations = 5000;
  double step_size = 0.05;
  double step_decay = 1e-3;  // eta_t = step_size / (1 + t * step_decay)
  double init_scale = 2.0;   // inner weights/biases start uniform in +-this
  int train_samples = 0;     // 0 = every grid point; >0 = stride subsample
                             // for the gradient loop (sup always full grid)
};

struct FitResult {
  ShallowNet net;
  double sup_error = 0.0;
};

FitResult fit_shallow(const Oracle& f, const Grid& grid, int units,
                      const FitConfig& cfg,
                      Activation act = Activation(ActivationKind::tanh),
                      const ShallowNet* warm_start = nullptr);

// Same trainer on an explicit table: rows of `points` (point_count x
// point_dim, row-major) against `targets`. This is what the layer-wise
// trainers call with feature tables.
FitResult fit_table(std::span<const double> points, int point_dim,
                    std::span<const double> targets, int units,
                    const FitConfig& cfg,
                    Activation act = Activation(ActivationKind::tanh),
                    const ShallowNet* warm_start = nullptr);

}  // namespace rescade
