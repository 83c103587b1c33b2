#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rescade/cascade.hpp"
#include "rescade/corpus.hpp"
#include "rescade/grid.hpp"
#include "rescade/shallow.hpp"

namespace rescade {

inline constexpr double kDefaultSingularFloor = 1e-2;

struct LayerCertificate {
  double min_singular_value = 0.0;
  double reconstruction_error = 0.0;  // max L2 round-trip error on the grid
};

// Random feature map y = act(A x + b), out_dim >= in_dim, with an
// invertibility certificate: A has min singular value >= tau and the
// pre-activations stay inside |z| <= 4 over [-1,1]^{in_dim}, so
// act^{-1} followed by the pseudo-inverse recovers x on the image.
struct LayerMap {
  int in_dim = 0;
  int out_dim = 0;
  Activation activation;          // bounded-invertible kinds only
  std::vector<double> matrix;     // out_dim x in_dim, row-major
  std::vector<double> bias;       // out_dim
  LayerCertificate certificate;

  void apply(std::span<const double> x, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> x) const;

  // Left inverse on the image (certification path only; the approximation
  // path never inverts anything). Throws CertificationError if a feature
  // value sits on the activation's saturation boundary.
  std::vector<double> reconstruct(std::span<const double> features) const;
};

struct VerifyResult {
  LayerCertificate certificate;
  bool passed = false;
};

// Deterministic default grid used to certify a map of the given input
// dimension (coarser as the dimension grows; at most a few thousand points).
Grid certification_grid(int in_dim);

// Sample-and-certify constructor. Retries new random draws until the scaled
// matrix clears the singular-value floor; throws CertificationError when the
// retry budget is exhausted (pathological tau), InvalidArgumentError for
// softplus (no bounded inverse) or out_dim < in_dim (not injective).
LayerMap make_invertible_layer(
    int in_dim, int out_dim, std::uint64_t seed,
    double tau = kDefaultSingularFloor,
    Activation act = Activation(ActivationKind::tanh));

// Re-derive the certificate on a caller-chosen grid; passed iff the measured
// reconstruction error is <= tol.
VerifyResult verify_invertibility(const LayerMap& layer, const Grid& grid,
                                  double tol);

// Present when the model consumes curve-projected inputs instead of raw ones.
struct HilbertReduction {
  int collapsed_dims = 0;  // d
  int level = 0;           // k
};

// Deep variant: an invertible chain G_1: R^{n'} -> R^W, G_j: R^W -> R^W
// carries the features; stage j's shallow reader taps the chain state after
// j maps, and the stage errors follow the same residual bookkeeping as the
// cascade.
struct LayerNetModel {
  int input_dim = 0;  // dimension of the points eval_layernet receives
  int width = 0;      // chain width and units per stage
  std::vector<LayerMap> chain;     // size depth
  std::vector<ShallowNet> stages;  // size depth
  double initial_error = 0.0;
  std::vector<double> scales;
  std::optional<HilbertReduction> reduction;

  int depth() const { return static_cast<int>(stages.size()); }
};

struct LayerNetTraining {
  LayerNetModel model;
  ErrorTrace trace;
};

// Width >= grid dimension. A caller-supplied chain (e.g. a near-identity
// embedding for comparisons) must match depth/width; when empty, maps are
// drawn from seeds derived from cfg.rng_seed.
LayerNetTraining train_layernet_ge(const Oracle& f, const Grid& grid,
                                   int depth, int width, const FitConfig& cfg,
                                   double tau = kDefaultSingularFloor,
                                   std::vector<LayerMap> chain = {});

// Error split of a reduced-input run over the original grid.
struct BoundReport {
  double projection_term_unit = 0.0;   // L * sqrt(d) / 2^{level+1}
  double projection_term_scaled = 0.0;  // the same term for the [-1,1] box (2x)
  double reduced_error = 0.0;           // trained error on the reduced grid
  double total_measured = 0.0;          // sup over the original grid
  double lipschitz_used = 0.0;
  std::string lipschitz_source;         // "analytic" or "estimated"
};

struct LayerNetReduced {
  LayerNetModel model;
  ErrorTrace trace;
  BoundReport report;
};

// Width <= grid dimension: collapse the first d = n - width + 1 coordinates
// through the curve embedding, train on the reduced domain, and measure the
// triangle split total <= projection_term_scaled + reduced_error (+1e-6
// numeric slack, asserted). The reduced grid's leading axis is the set of
// embedding scalars actually reachable from the original grid, so the
// measured reduced error covers every projected point exactly.
LayerNetReduced train_layernet_lt(const TargetFunction& f, const Grid& grid,
                                  int depth, int width, int level,
                                  const FitConfig& cfg,
                                  double tau = kDefaultSingularFloor);

double eval_layernet(const LayerNetModel& model, std::span<const double> x);
double eval_layernet_prefix(const LayerNetModel& model,
                            std::span<const double> x, int depth);

}  // namespace rescade
