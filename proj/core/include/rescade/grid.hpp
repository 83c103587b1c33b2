#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace rescade {

// Scalar field on a low-dimensional box; the only thing the library ever asks
// of a target function.
using Oracle = std::function<double(std::span<const double>)>;

// Hard cap on lattice sizes so a typo like p=100000, n=3 fails fast instead
// of thrashing the machine.
inline constexpr std::size_t kDefaultMaxLatticePoints = std::size_t{1} << 26;

// Tensor-product lattice on [-1,1]^n, stored as one point vector per axis
// (never materialized as a full point list). Point index order is
// lexicographic with axis 0 most significant / last axis fastest.
class Grid {
 public:
  // Uniform lattice with p points per axis including both endpoints:
  // axis values 2*i/(p-1) - 1 for i = 0..p-1.
  static Grid uniform(int dims, int points_per_axis,
                      std::size_t max_points = kDefaultMaxLatticePoints);

  // Lattice with explicit per-axis point sets (each strictly increasing).
  // Used for reduced-space grids whose collapsed axis is non-uniform.
  static Grid from_axes(std::vector<std::vector<double>> axes,
                        std::size_t max_points = kDefaultMaxLatticePoints);

  int dims() const { return static_cast<int>(axes_.size()); }
  std::size_t size() const { return total_; }
  std::size_t axis_size(int axis) const { return axes_[axis].size(); }
  const std::vector<double>& axis(int a) const { return axes_[a]; }

  // Decode a lexicographic index into coordinates.
  void point(std::size_t index, std::span<double> out) const;
  std::vector<double> point(std::size_t index) const;

  // Visit every point in index order. fn(index, coords) gets a span that is
  // only valid for the duration of the call.
  template <class Fn>
  void for_each(Fn&& fn) const {
    const int nd = dims();
    std::vector<std::size_t> digit(nd, 0);
    std::vector<double> pt(nd);
    for (int a = 0; a < nd; ++a) pt[a] = axes_[a][0];
    for (std::size_t i = 0; i < total_; ++i) {
      fn(i, std::span<const double>(pt.data(), pt.size()));
      for (int a = nd - 1; a >= 0; --a) {
        if (++digit[a] < axes_[a].size()) {
          pt[a] = axes_[a][digit[a]];
          break;
        }
        digit[a] = 0;
        pt[a] = axes_[a][0];
      }
    }
  }

 private:
  Grid() = default;
  std::vector<std::vector<double>> axes_;
  std::size_t total_ = 0;
};

// Uniform lattice factory matching the measurement convention used
// throughout: both endpoints included, p >= 2 points per axis.
Grid make_grid(int dims, int points_per_axis,
               std::size_t max_points = kDefaultMaxLatticePoints);

// max over grid points of |f(x) - g(x)|. Throws InvalidOracleError if either
// function produces a non-finite value. Ties keep the earliest point, so the
// result is deterministic.
double sup_norm_diff(const Oracle& f, const Oracle& g, const Grid& grid);

// Convenience: sup-norm of f itself (g == 0).
double sup_norm(const Oracle& f, const Grid& grid);

// First-order Lipschitz estimate: max over axis-adjacent grid pairs of
// |f(x) - f(y)| / ||x - y||_2. Requires at least 3 points per axis. This is a
// lower bound on the true constant; callers that need a guarantee should
// supply an analytic value instead.
double estimate_lipschitz(const Oracle& f, const Grid& grid);

}  // namespace rescade
