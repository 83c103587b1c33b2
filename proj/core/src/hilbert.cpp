#include "rescade/hilbert.hpp"

#include <cmath>
#include <string>

#include "rescade/errors.hpp"

namespace rescade {

namespace {

constexpr int kMaxIndexBits = 64;
// Above this many total bits the double embedding can no longer recover the
// index exactly (53-bit mantissa minus rounding headroom).
constexpr int kMaxEmbedBits = 48;

void check_shape(int dims, int level, int max_bits) {
  if (dims < 1) throw InvalidArgumentError("curve dims must be >= 1");
  if (level < 1) throw InvalidArgumentError("curve level must be >= 1");
  if (dims > max_bits || level > max_bits / dims)
    throw UnsupportedPrecisionError(
        "dims*level = " + std::to_string(dims) + "*" + std::to_string(level) +
        " exceeds the " + std::to_string(max_bits) + "-bit budget");
}

// Skilling's transpose-form transforms. The "transpose" of an index is one
// word per axis, word i holding index bits i, i+n, i+2n, ... (bit r of word i
// is index bit (level-1-r)*n + i counted from the most significant end).

// In place: axis coordinates -> transposed Hilbert index.
void axes_to_transpose(std::vector<std::uint64_t>& x, int bits) {
  const int n = static_cast<int>(x.size());
  // Inverse undo
  for (std::uint64_t q = std::uint64_t{1} << (bits - 1); q > 1; q >>= 1) {
    const std::uint64_t p = q - 1;
    for (int i = 0; i < n; ++i) {
      if (x[i] & q) {
        x[0] ^= p;  // invert
      } else {
        const std::uint64_t t = (x[0] ^ x[i]) & p;
        x[0] ^= t;
        x[i] ^= t;
      }
    }
  }
  // Gray encode
  for (int i = 1; i < n; ++i) x[i] ^= x[i - 1];
  std::uint64_t t = 0;
  for (std::uint64_t q = std::uint64_t{1} << (bits - 1); q > 1; q >>= 1)
    if (x[n - 1] & q) t ^= q - 1;
  for (int i = 0; i < n; ++i) x[i] ^= t;
}

// In place: transposed Hilbert index -> axis coordinates.
void transpose_to_axes(std::vector<std::uint64_t>& x, int bits) {
  const int n = static_cast<int>(x.size());
  // Gray decode by H ^ (H/2)
  std::uint64_t t = x[n - 1] >> 1;
  for (int i = n - 1; i > 0; --i) x[i] ^= x[i - 1];
  x[0] ^= t;
  // Undo excess work
  for (int r = 1; r < bits; ++r) {
    const std::uint64_t q = std::uint64_t{1} << r;
    const std::uint64_t p = q - 1;
    for (int i = n - 1; i >= 0; --i) {
      if (x[i] & q) {
        x[0] ^= p;
      } else {
        const std::uint64_t s = (x[0] ^ x[i]) & p;
        x[0] ^= s;
        x[i] ^= s;
      }
    }
  }
}

std::uint64_t pack_transpose(const std::vector<std::uint64_t>& x, int bits) {
  const int n = static_cast<int>(x.size());
  std::uint64_t v = 0;
  for (int r = bits - 1; r >= 0; --r)
    for (int i = 0; i < n; ++i)
      v = (v << 1) | ((x[i] >> r) & 1ULL);
  return v;
}

std::vector<std::uint64_t> unpack_transpose(std::uint64_t v, int dims,
                                            int bits) {
  std::vector<std::uint64_t> x(dims, 0);
  int pos = dims * bits;
  for (int r = bits - 1; r >= 0; --r)
    for (int i = 0; i < dims; ++i) {
      --pos;
      x[i] |= ((v >> pos) & 1ULL) << r;
    }
  return x;
}

std::uint64_t max_index(int dims, int level) {
  const int bits = dims * level;
  return bits == 64 ? ~std::uint64_t{0}
                    : (std::uint64_t{1} << bits) - 1;
}

}  // namespace

HilbertIndex hilbert_encode(const CellCoord& cell) {
  check_shape(cell.dims, cell.level, kMaxIndexBits);
  if (static_cast<int>(cell.coords.size()) != cell.dims)
    throw InvalidArgumentError("coordinate count does not match dims");
  const std::uint64_t side =
      cell.level == 64 ? 0 : std::uint64_t{1} << cell.level;
  std::vector<std::uint64_t> x = cell.coords;
  for (const std::uint64_t c : x)
    if (cell.level < 64 && c >= side)
      throw InvalidArgumentError("cell coordinate " + std::to_string(c) +
                                 " out of range for level " +
                                 std::to_string(cell.level));
  axes_to_transpose(x, cell.level);
  return HilbertIndex{pack_transpose(x, cell.level), cell.dims, cell.level};
}

CellCoord hilbert_decode(const HilbertIndex& index) {
  check_shape(index.dims, index.level, kMaxIndexBits);
  const int bits = index.dims * index.level;
  if (bits < 64 && index.value > max_index(index.dims, index.level))
    throw InvalidArgumentError("index value out of range for dims*level = " +
                               std::to_string(bits) + " bits");
  std::vector<std::uint64_t> x =
      unpack_transpose(index.value, index.dims, index.level);
  transpose_to_axes(x, index.level);
  return CellCoord{index.dims, index.level, std::move(x)};
}

std::pair<HilbertIndex, std::vector<double>> snap_point(
    std::span<const double> unit_point, int level) {
  const int dims = static_cast<int>(unit_point.size());
  check_shape(dims, level, kMaxIndexBits);
  const std::uint64_t top_cell =
      level == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << level) - 1;
  const double side = std::ldexp(1.0, level);
  CellCoord cell{dims, level, std::vector<std::uint64_t>(dims)};
  std::vector<double> center(dims);
  for (int i = 0; i < dims; ++i) {
    const double u = unit_point[i];
    if (!(u >= 0.0 && u <= 1.0))
      throw InvalidArgumentError("snap input component " + std::to_string(i) +
                                 " outside [0,1]");
    const double c = std::floor(std::ldexp(u, level));
    // u == 1.0 belongs to the last cell; the comparison also keeps the
    // double->integer cast in range.
    const std::uint64_t ci =
        (c <= 0.0) ? 0
        : (c >= side) ? top_cell
                      : static_cast<std::uint64_t>(c);
    cell.coords[i] = ci;
    center[i] = std::ldexp(static_cast<double>(ci) + 0.5, -level);
  }
  return {hilbert_encode(cell), std::move(center)};
}

double embed_index(const HilbertIndex& index) {
  check_shape(index.dims, index.level, kMaxEmbedBits);
  const double m = static_cast<double>(max_index(index.dims, index.level));
  return 2.0 * (static_cast<double>(index.value) / m) - 1.0;
}

std::vector<double> project_coords(std::span<const double> x,
                                   int collapse_dims, int level) {
  const int n = static_cast<int>(x.size());
  if (collapse_dims < 1 || collapse_dims > n)
    throw InvalidArgumentError("collapse_dims must be in [1, dims]");
  check_shape(collapse_dims, level, kMaxEmbedBits);
  for (int i = 0; i < n; ++i)
    if (!(x[i] >= -1.0 && x[i] <= 1.0))
      throw InvalidArgumentError("point component " + std::to_string(i) +
                                 " outside [-1,1]");

  std::vector<double> unit(collapse_dims);
  for (int i = 0; i < collapse_dims; ++i) unit[i] = (x[i] + 1.0) / 2.0;
  const auto snapped = snap_point(unit, level);

  std::vector<double> out;
  out.reserve(n - collapse_dims + 1);
  out.push_back(embed_index(snapped.first));
  for (int i = collapse_dims; i < n; ++i) out.push_back(x[i]);
  return out;
}

std::vector<double> lift_coords(std::span<const double> z, int collapse_dims,
                                int level, int output_dims) {
  check_shape(collapse_dims, level, kMaxEmbedBits);
  if (output_dims < collapse_dims)
    throw InvalidArgumentError("output_dims must be >= collapse_dims");
  if (static_cast<int>(z.size()) != output_dims - collapse_dims + 1)
    throw InvalidArgumentError("reduced point has wrong size");
  if (!(z[0] >= -1.0 && z[0] <= 1.0))
    throw InvalidArgumentError("embedded scalar outside [-1,1]");

  const double m = static_cast<double>(max_index(collapse_dims, level));
  const double s01 = (z[0] + 1.0) / 2.0;
  double v = std::round(s01 * m);
  if (v < 0.0) v = 0.0;
  if (v > m) v = m;
  const CellCoord cell = hilbert_decode(
      HilbertIndex{static_cast<std::uint64_t>(v), collapse_dims, level});

  std::vector<double> out(output_dims);
  for (int i = 0; i < collapse_dims; ++i) {
    const double center =
        std::ldexp(static_cast<double>(cell.coords[i]) + 0.5, -level);
    out[i] = 2.0 * center - 1.0;
  }
  for (int i = collapse_dims; i < output_dims; ++i)
    out[i] = z[i - collapse_dims + 1];
  return out;
}

}  // namespace rescade
