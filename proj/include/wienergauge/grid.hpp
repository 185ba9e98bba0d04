#pragma once

// Uniform Cartesian lattices and real-valued functions on their nodes.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <ios>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wienergauge/errors.hpp"
#include "wienergauge/format.hpp"

namespace wienergauge {

inline constexpr int kMaxDim = 3;
using Point = std::array<double, kMaxDim>;
using Index = std::array<std::int64_t, kMaxDim>;

/// Largest node count make_grid accepts unless the caller raises it.
inline constexpr std::size_t kDefaultNodeBudget = std::size_t{1} << 23;

inline double distance(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

/// Nodes are origin + i*h per axis, i in [0, counts[axis]).  Storage is
/// row-major: the last axis varies fastest.
struct Grid {
  int dim = 2;
  Point origin{};
  double h = 1.0;
  Index counts{1, 1, 1};

  std::size_t size() const {
    std::size_t n = 1;
    for (int k = 0; k < dim; ++k) n *= static_cast<std::size_t>(counts[k]);
    return n;
  }

  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int k = dim - 1; k > axis; --k) s *= static_cast<std::size_t>(counts[k]);
    return s;
  }

  Index unravel(std::size_t idx) const {
    Index i{0, 0, 0};
    for (int k = dim - 1; k >= 0; --k) {
      const auto n = static_cast<std::size_t>(counts[k]);
      i[k] = static_cast<std::int64_t>(idx % n);
      idx /= n;
    }
    return i;
  }

  std::size_t index(const Index& i) const {
    std::size_t idx = 0;
    for (int k = 0; k < dim; ++k) idx = idx * static_cast<std::size_t>(counts[k]) + static_cast<std::size_t>(i[k]);
    return idx;
  }

  double coord(int axis, std::int64_t i) const { return origin[axis] + static_cast<double>(i) * h; }

  Point point(std::size_t idx) const {
    const Index i = unravel(idx);
    Point x{0.0, 0.0, 0.0};
    for (int k = 0; k < dim; ++k) x[k] = coord(k, i[k]);
    return x;
  }

  bool on_box_boundary(std::size_t idx) const {
    const Index i = unravel(idx);
    for (int k = 0; k < dim; ++k)
      if (i[k] == 0 || i[k] == counts[k] - 1) return true;
    return false;
  }

  Point center() const {
    Point c{0.0, 0.0, 0.0};
    for (int k = 0; k < dim; ++k) c[k] = origin[k] + 0.5 * static_cast<double>(counts[k] - 1) * h;
    return c;
  }

  /// Radius of the largest ball about `c` inside the closed box.
  double inscribed_radius(const Point& c) const {
    double r = std::numeric_limits<double>::infinity();
    for (int k = 0; k < dim; ++k) {
      const double lo = origin[k];
      const double hi = coord(k, counts[k] - 1);
      r = std::min({r, c[k] - lo, hi - c[k]});
    }
    return r;
  }

  bool contains_ball(const Point& c, double radius) const {
    return inscribed_radius(c) >= radius * (1.0 - 1e-12);
  }

  std::size_t cell_count() const {
    std::size_t n = 1;
    for (int k = 0; k < dim; ++k) n *= static_cast<std::size_t>(std::max<std::int64_t>(counts[k] - 1, 0));
    return n;
  }

  std::string describe() const {
    std::string s;
    for (int k = 0; k < dim; ++k) s += (k ? "x" : "") + std::to_string(counts[k]);
    return s + " h=" + format_real(h);
  }
};

/// Grid with the node count chosen so that the closed box of the given
/// half-width is covered and `center` is a node.
inline Grid make_grid(int dim, const Point& center, double half_width, double h,
                      std::size_t budget = kDefaultNodeBudget) {
  if (dim != 2 && dim != 3) throw PreconditionError("grid dimension must be 2 or 3, got " + std::to_string(dim));
  if (!(h > 0.0) || !std::isfinite(h)) throw PreconditionError("grid spacing must be positive");
  if (!(half_width >= 2.0 * h)) {
    throw PreconditionError("half_width " + format_real(half_width) + " is below twice the spacing " +
                            format_real(h));
  }
  const auto m = static_cast<std::int64_t>(std::ceil(half_width / h - 1e-9));
  const std::int64_t n = 2 * m + 1;
  double total = 1.0;
  for (int k = 0; k < dim; ++k) total *= static_cast<double>(n);
  if (total > static_cast<double>(budget)) throw BudgetError(static_cast<std::size_t>(total), budget);
  Grid g;
  g.dim = dim;
  g.h = h;
  for (int k = 0; k < dim; ++k) {
    g.counts[k] = n;
    g.origin[k] = center[k] - static_cast<double>(m) * h;
  }
  return g;
}

/// Same box, half the spacing.
inline Grid refine(const Grid& g) {
  Grid r = g;
  r.h = 0.5 * g.h;
  for (int k = 0; k < g.dim; ++k) r.counts[k] = 2 * (g.counts[k] - 1) + 1;
  return r;
}

enum class NodeRole : std::uint8_t { free, fixed_one, fixed_zero, fixed_value, exterior };

inline bool is_free(NodeRole r) { return r == NodeRole::free; }

struct GridFunction {
  Grid grid;
  std::vector<double> values;
  std::vector<NodeRole> mask;

  GridFunction() = default;
  explicit GridFunction(const Grid& g, double fill = 0.0)
      : grid(g), values(g.size(), fill), mask(g.size(), NodeRole::free) {}

  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  std::size_t size() const { return values.size(); }
};

namespace detail {

template <class T>
void write_le(std::ostream& os, T v) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  char buf[8];
  std::memcpy(buf, &bits, 8);
  os.write(buf, 8);
}

template <class T>
T read_le(std::istream& is) {
  char buf[8];
  if (!is.read(buf, 8)) throw FormatError("truncated grid function stream");
  std::uint64_t bits;
  std::memcpy(&bits, buf, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  T v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace detail

/// Dense little-endian layout: N (int64), counts[N] (int64), origin[N]
/// (float64), h (float64), then values in row-major order (float64).
inline void write_binary(std::ostream& os, const GridFunction& f) {
  const Grid& g = f.grid;
  detail::write_le<std::int64_t>(os, g.dim);
  for (int k = 0; k < g.dim; ++k) detail::write_le<std::int64_t>(os, g.counts[k]);
  for (int k = 0; k < g.dim; ++k) detail::write_le<double>(os, g.origin[k]);
  detail::write_le<double>(os, g.h);
  for (double v : f.values) detail::write_le<double>(os, v);
}

inline GridFunction read_binary(std::istream& is) {
  Grid g;
  const auto dim = detail::read_le<std::int64_t>(is);
  if (dim != 2 && dim != 3) throw FormatError("grid function header has dimension " + std::to_string(dim));
  g.dim = static_cast<int>(dim);
  for (int k = 0; k < g.dim; ++k) {
    g.counts[k] = detail::read_le<std::int64_t>(is);
    if (g.counts[k] < 1) throw FormatError("grid function header has an empty axis");
  }
  for (int k = 0; k < g.dim; ++k) g.origin[k] = detail::read_le<double>(is);
  g.h = detail::read_le<double>(is);
  GridFunction f(g);
  for (double& v : f.values) v = detail::read_le<double>(is);
  return f;
}

/// One row per node: x1,...,xN,value.
inline void write_csv(std::ostream& os, const GridFunction& f) {
  const Grid& g = f.grid;
  for (int k = 0; k < g.dim; ++k) os << (k ? ",x" : "x") << (k + 1);
  os << ",value\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Point x = g.point(i);
    for (int k = 0; k < g.dim; ++k) os << format_real(x[k]) << ',';
    os << format_real(f.values[i]) << '\n';
  }
}

}  // namespace wienergauge
