#include "rescade/corpus.hpp"

#include <cmath>

#include "rescade/errors.hpp"

namespace rescade {

namespace {

std::vector<TargetFunction> build_corpus() {
  std::vector<TargetFunction> fns;

  // 1D, very smooth, moderately steep. L = max 2*sech^2(2x) = 2 at x = 0.
  fns.push_back(TargetFunction{
      "tanh2x", 1,
      [](std::span<const double> x) { return std::tanh(2.0 * x[0]); }, 3,
      2.0, false});

  // 1D Gaussian bump, scaled so that for m = 1 both the function and its
  // derivative stay below 1 in sup norm (0.25 + ~0.429). The derivative
  // -2x e^{-4x^2} peaks at x = 1/(2 sqrt 2), giving L = e^{-1/2}/sqrt(2).
  fns.push_back(TargetFunction{
      "bump1d", 1,
      [](std::span<const double> x) {
        return 0.25 * std::exp(-4.0 * x[0] * x[0]);
      },
      1, std::exp(-0.5) / std::sqrt(2.0), true});

  // 2D ridge cosine. Gradient norm 0.5*(pi/2)*sqrt(2)*|sin(...)| peaks where
  // x+y = 1, giving L = pi*sqrt(2)/4.
  fns.push_back(TargetFunction{
      "cos2d", 2,
      [](std::span<const double> x) {
        return 0.5 * std::cos(0.5 * M_PI * (x[0] + x[1]));
      },
      2, M_PI * std::sqrt(2.0) / 4.0, false});

  // 3D radial Gaussian. ||grad|| = 1.8 r e^{-r^2} peaks at r = 1/sqrt(2)
  // (inside the box), giving L = 0.9 sqrt(2) e^{-1/2}.
  fns.push_back(TargetFunction{
      "radial3d", 3,
      [](std::span<const double> x) {
        const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        return 0.9 * std::exp(-r2);
      },
      2, 0.9 * std::sqrt(2.0) * std::exp(-0.5), false});

  return fns;
}

}  // namespace

const std::vector<TargetFunction>& builtin_corpus() {
  static const std::vector<TargetFunction> corpus = build_corpus();
  return corpus;
}

const TargetFunction& find_function(const std::string& name) {
  std::string known;
  for (const auto& f : builtin_corpus()) {
    if (f.name == name) return f;
    if (!known.empty()) known += ", ";
    known += f.name;
  }
  throw InvalidArgumentError("unknown function '" + name + "' (known: " +
                             known + ")");
}

int default_grid_points(int dims) {
  switch (dims) {
    case 1:
      return 1025;
    case 2:
      return 129;
    case 3:
      return 33;
    default:
      return 9;
  }
}

Grid default_grid(const TargetFunction& f) {
  return Grid::uniform(f.dims, default_grid_points(f.dims));
}

}  // namespace rescade
