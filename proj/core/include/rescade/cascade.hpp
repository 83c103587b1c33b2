#pragma once

#include <span>
#include <string>
#include <vector>

#include "rescade/grid.hpp"
#include "rescade/shallow.hpp"

namespace rescade {

// What the stages after the first see as input, besides x itself:
// nothing extra, the running approximant value, or the previous stage's
// hidden-unit outputs.
enum class FeatureMode { x_only, x_plus_prev_approx, x_plus_prev_layer };

const char* feature_mode_name(FeatureMode mode);
FeatureMode parse_feature_mode(const std::string& name);

// Per-stage sup errors of a layer-wise residual run. per_layer[0] is the raw
// stage-1 error; entries after that are errors of normalized residual fits
// (each in (0, 1] by construction). cumulative[j] is the running product,
// which equals the measured sup error of the depth-(j+1) composite.
struct ErrorTrace {
  std::vector<double> per_layer;
  std::vector<double> cumulative;
};

// Trained cascade. Stage 1 approximates f directly; stage j >= 2 approximates
// the normalized residual left by stages 1..j-1 and contributes
// initial_error * scales[0] * ... * scales[j-3] * g_j to the composite.
struct CascadeModel {
  int input_dim = 0;
  FeatureMode mode = FeatureMode::x_only;
  double initial_error = 0.0;       // sup error of stage 1; multiplier of stage 2
  std::vector<double> scales;       // normalized stage errors, one per stage >= 2
  std::vector<ShallowNet> layers;

  int depth() const { return static_cast<int>(layers.size()); }

  // Input dimension stage `stage` (1-based) reads, as implied by the mode.
  int feature_dim(int stage) const;
};

struct CascadeTraining {
  CascadeModel model;
  ErrorTrace trace;
  // Normalized residual table over the training grid after the last stage;
  // empty when training early-stopped on a numerically exact fit.
  std::vector<double> final_residual;
};

// Layer-wise residual training: fit stage 1 to f, then repeatedly normalize
// the residual to sup-norm 1 on the grid and fit the next stage to it. A
// stage that fails to beat the trivial zero approximation is replaced by the
// zero function (its normalized error is then exactly 1). Stops early when a
// stage error drops below 1e-12. Requires sup |f| <= 1 on the grid.
CascadeTraining train_cascade(const Oracle& f, const Grid& grid, int depth,
                              int width, FeatureMode mode,
                              const FitConfig& cfg,
                              Activation act = Activation(ActivationKind::tanh));

double eval_cascade(const CascadeModel& model, std::span<const double> x);

// Composite truncated after `depth` stages (1 <= depth <= model.depth()).
double eval_cascade_prefix(const CascadeModel& model,
                           std::span<const double> x, int depth);

// The normalized residual after `stages` stages as a callable — the exact
// target the next stage would train on. Throws ExactFitError if any
// normalizer is below 1e-12 (the residual is then undefined).
Oracle residual_oracle(const CascadeModel& model, Oracle f, int stages);

}  // namespace rescade
