#include "rescade/grid.hpp"

#include <cmath>
#include <string>

#include "rescade/errors.hpp"

namespace rescade {

namespace {

std::size_t checked_total(const std::vector<std::vector<double>>& axes,
                          std::size_t max_points) {
  std::size_t total = 1;
  for (const auto& ax : axes) {
    const std::size_t s = ax.size();
    if (s == 0) throw InvalidArgumentError("grid axis with zero points");
    if (total > max_points / s)
      throw ResourceExhaustedError(
          "lattice would exceed the memory budget of " +
          std::to_string(max_points) +
          " points; use a coarser grid or evaluate in a streaming pass");
    total *= s;
  }
  return total;
}

}  // namespace

Grid Grid::uniform(int dims, int points_per_axis, std::size_t max_points) {
  if (dims < 1) throw InvalidArgumentError("grid dims must be >= 1");
  if (points_per_axis < 2)
    throw InvalidArgumentError("grid needs at least 2 points per axis");
  std::vector<double> ax(points_per_axis);
  const double denom = static_cast<double>(points_per_axis - 1);
  for (int i = 0; i < points_per_axis; ++i)
    ax[i] = 2.0 * static_cast<double>(i) / denom - 1.0;
  std::vector<std::vector<double>> axes(static_cast<std::size_t>(dims), ax);
  return from_axes(std::move(axes), max_points);
}

Grid Grid::from_axes(std::vector<std::vector<double>> axes,
                     std::size_t max_points) {
  if (axes.empty()) throw InvalidArgumentError("grid needs at least one axis");
  for (const auto& ax : axes)
    for (std::size_t i = 1; i < ax.size(); ++i)
      if (!(ax[i - 1] < ax[i]))
        throw InvalidArgumentError("grid axis is not strictly increasing");
  Grid g;
  g.total_ = checked_total(axes, max_points);
  g.axes_ = std::move(axes);
  return g;
}

void Grid::point(std::size_t index, std::span<double> out) const {
  const int nd = dims();
  for (int a = nd - 1; a >= 0; --a) {
    const std::size_t s = axes_[a].size();
    out[a] = axes_[a][index % s];
    index /= s;
  }
}

std::vector<double> Grid::point(std::size_t index) const {
  std::vector<double> pt(dims());
  point(index, pt);
  return pt;
}

Grid make_grid(int dims, int points_per_axis, std::size_t max_points) {
  return Grid::uniform(dims, points_per_axis, max_points);
}

double sup_norm_diff(const Oracle& f, const Oracle& g, const Grid& grid) {
  double best = -1.0;
  grid.for_each([&](std::size_t i, std::span<const double> x) {
    const double fv = f(x);
    const double gv = g(x);
    if (!std::isfinite(fv) || !std::isfinite(gv))
      throw InvalidOracleError("non-finite value at grid index " +
                               std::to_string(i));
    const double d = std::fabs(fv - gv);
    if (d > best) best = d;
  });
  return best;
}

double sup_norm(const Oracle& f, const Grid& grid) {
  return sup_norm_diff(f, [](std::span<const double>) { return 0.0; }, grid);
}

double estimate_lipschitz(const Oracle& f, const Grid& grid) {
  const int nd = grid.dims();
  for (int a = 0; a < nd; ++a)
    if (grid.axis_size(a) < 3)
      throw InvalidArgumentError(
          "lipschitz estimation needs at least 3 points per axis");

  // Tabulate f once, then scan axis-adjacent pairs. The grid budget already
  // bounds the table size.
  std::vector<double> table(grid.size());
  grid.for_each([&](std::size_t i, std::span<const double> x) {
    const double v = f(x);
    if (!std::isfinite(v))
      throw InvalidOracleError("non-finite value at grid index " +
                               std::to_string(i));
    table[i] = v;
  });

  // stride[a] = index distance between neighbors along axis a.
  std::vector<std::size_t> stride(nd, 1);
  for (int a = nd - 2; a >= 0; --a)
    stride[a] = stride[a + 1] * grid.axis_size(a + 1);

  double best = 0.0;
  std::vector<std::size_t> digit(nd, 0);
  const std::size_t total = grid.size();
  for (std::size_t i = 0; i < total; ++i) {
    for (int a = 0; a < nd; ++a) {
      const std::size_t c = digit[a];
      if (c + 1 < grid.axis_size(a)) {
        const double dx = grid.axis(a)[c + 1] - grid.axis(a)[c];
        const double df = std::fabs(table[i + stride[a]] - table[i]);
        const double slope = df / dx;
        if (slope > best) best = slope;
      }
    }
    for (int a = nd - 1; a >= 0; --a) {
      if (++digit[a] < grid.axis_size(a)) break;
      digit[a] = 0;
    }
  }
  return best;
}

}  // namespace rescade
