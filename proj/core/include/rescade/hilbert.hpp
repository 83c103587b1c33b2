#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace rescade {

// Cell on the 2^level x ... x 2^level lattice over [0,1]^dims.
struct CellCoord {
  int dims = 1;
  int level = 1;                      // bits per axis (k)
  std::vector<std::uint64_t> coords;  // each < 2^level
};

// Position along the curve through that lattice: a dims*level-bit integer.
struct HilbertIndex {
  std::uint64_t value = 0;
  int dims = 1;
  int level = 1;
};

// encode/decode carry the full curve order: adjacent indices map to cells
// that differ by exactly one step along one axis. Requires
// 1 <= dims, 1 <= level, dims*level <= 64 (unsupported_precision beyond).
HilbertIndex hilbert_encode(const CellCoord& cell);
CellCoord hilbert_decode(const HilbertIndex& index);

// Snap a point of [0,1]^dims to its cell at the given level and return the
// curve index together with the cell center ((c_i + 0.5) / 2^level).
// Out-of-range components are invalid_argument.
std::pair<HilbertIndex, std::vector<double>> snap_point(
    std::span<const double> unit_point, int level);

// Scalar embedding of an index: 2 * (value / (2^{dims*level} - 1)) - 1,
// mapping the curve-order position into [-1,1]. Exact index recovery needs
// headroom below the 53-bit mantissa, so embedding ops require
// dims*level <= 48.
double embed_index(const HilbertIndex& index);

// Collapse the first `collapse_dims` coordinates of x (a point of [-1,1]^n)
// into the scalar embedding of their cell's curve index, keeping the rest:
// output = [embed, x_{d}, ..., x_{n-1}], of size n - collapse_dims + 1.
std::vector<double> project_coords(std::span<const double> x,
                                   int collapse_dims, int level);

// Inverse direction: decode the leading scalar back to the cell center and
// re-expand to output_dims coordinates in [-1,1]^output_dims. lift then
// project is the identity on the image of project.
std::vector<double> lift_coords(std::span<const double> z, int collapse_dims,
                                int level, int output_dims);

}  // namespace rescade
