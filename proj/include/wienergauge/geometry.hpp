#pragma once

// Model domains near a boundary point, obstacle rasterization and radial
// cutoff functions.  Every gallery domain has its boundary point at the
// origin.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "wienergauge/errors.hpp"
#include "wienergauge/format.hpp"
#include "wienergauge/grid.hpp"

namespace wienergauge {

/// Slack for membership in lower-dimensional sets (slits, points, axes).
inline constexpr double kSetTolerance = 1e-12;

struct DomainSpec {
  int dim = 2;
  /// true when the point belongs to the closed complement E^c.
  std::function<bool(const Point&)> complement;
  std::string name;
  std::vector<double> params;

  bool in_complement(const Point& x) const { return complement(x); }
};

struct BoundaryPoint {
  Point y{0.0, 0.0, 0.0};
  int dim = 2;
};

/// True when the complement predicate takes both values among y and its
/// lattice neighbours at spacing h.
inline bool is_boundary_point(const DomainSpec& domain, const BoundaryPoint& bp, double h) {
  if (bp.dim != domain.dim) return false;
  bool seen_in = domain.in_complement(bp.y);
  bool seen_out = !seen_in;
  const int n = 1;
  Index lo{-n, -n, -n};
  Index hi{n, n, n};
  for (int k = domain.dim; k < kMaxDim; ++k) lo[k] = hi[k] = 0;
  for (std::int64_t a = lo[0]; a <= hi[0]; ++a)
    for (std::int64_t b = lo[1]; b <= hi[1]; ++b)
      for (std::int64_t c = lo[2]; c <= hi[2]; ++c) {
        Point x = bp.y;
        x[0] += static_cast<double>(a) * h;
        x[1] += static_cast<double>(b) * h;
        x[2] += static_cast<double>(c) * h;
        if (domain.in_complement(x))
          seen_in = true;
        else
          seen_out = true;
      }
  return seen_in && seen_out;
}

namespace detail {

inline double norm(const Point& x, int dim) { return distance(x, Point{0.0, 0.0, 0.0}, dim); }

inline DomainSpec make_cone(int dim, double theta) {
  if (!(theta > 0.0 && theta < std::numbers::pi)) throw PreconditionError("cone aperture must lie in (0, pi)");
  const double c = std::cos(theta);
  DomainSpec d;
  d.dim = dim;
  d.name = "cone";
  d.params = {theta};
  // Axis along -e_N, vertex at the origin.
  d.complement = [dim, c](const Point& x) {
    const double r = norm(x, dim);
    return -x[dim - 1] >= r * c - kSetTolerance * std::max(r, 1.0);
  };
  return d;
}

}  // namespace detail

inline const std::vector<std::string>& gallery_names() {
  static const std::vector<std::string> names{"full_ball", "half_space", "cone",  "slit",
                                              "point",     "spine",      "square_minus_segment"};
  return names;
}

/// Dimension a gallery entry uses when the caller does not pick one.
inline int gallery_default_dim(std::string_view name) {
  return (name == "cone" || name == "spine") ? 3 : 2;
}

/// Named model domain.  `token` is `name` or `name:param`; `dim` of 0 picks
/// the entry's default dimension.
///
///   full_ball             E^c = closed unit ball about y (y is interior to E^c;
///                         kept as the densest reference case)
///   half_space            E^c = {x_N <= 0}
///   cone:theta            circular cone of half-aperture theta, axis -e_N
///   slit                  E^c = {x_N = 0, x_1 <= 0}
///   point                 E^c = {y}
///   spine:c               (N = 3) E^c = {x_1 >= 0, |(x_2, x_3)| <= exp(-c / x_1)}
///   square_minus_segment  (N = 2) E = (-1,1)^2 minus the segment [-1/2, 0] x {0}
inline DomainSpec gallery(std::string_view token, int dim = 0) {
  std::string_view name = token;
  std::string_view param_text;
  bool has_param = false;
  if (const auto colon = token.find(':'); colon != std::string_view::npos) {
    name = token.substr(0, colon);
    param_text = token.substr(colon + 1);
    has_param = true;
  }
  const auto& names = gallery_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string valid;
    for (const auto& n : names) valid += (valid.empty() ? "" : ", ") + n;
    throw PreconditionError("unknown domain '" + std::string(name) + "'; valid names: " + valid);
  }
  double param = 0.0;
  if (has_param && !parse_real(param_text, param))
    throw PreconditionError("malformed domain parameter '" + std::string(param_text) + "'");
  if (has_param && name != "cone" && name != "spine")
    throw PreconditionError("domain '" + std::string(name) + "' takes no parameter");
  if (dim == 0) dim = gallery_default_dim(name);
  if (dim != 2 && dim != 3) throw PreconditionError("domain dimension must be 2 or 3");

  DomainSpec d;
  d.dim = dim;
  d.name = std::string(name);
  if (name == "full_ball") {
    d.complement = [dim](const Point& x) { return detail::norm(x, dim) <= 1.0 + kSetTolerance; };
  } else if (name == "half_space") {
    d.complement = [dim](const Point& x) { return x[dim - 1] <= kSetTolerance; };
  } else if (name == "cone") {
    d = detail::make_cone(dim, has_param ? param : std::numbers::pi / 4.0);
  } else if (name == "slit") {
    d.complement = [dim](const Point& x) {
      return std::abs(x[dim - 1]) <= kSetTolerance && x[0] <= kSetTolerance;
    };
  } else if (name == "point") {
    d.complement = [dim](const Point& x) { return detail::norm(x, dim) <= kSetTolerance; };
  } else if (name == "spine") {
    if (dim != 3) throw PreconditionError("spine is defined in dimension 3 only");
    const double c = has_param ? param : 1.0;
    if (!(c > 0.0)) throw PreconditionError("spine constant must be positive");
    d.params = {c};
    d.complement = [c](const Point& x) {
      if (x[0] < -kSetTolerance) return false;
      const double r = std::hypot(x[1], x[2]);
      if (x[0] <= kSetTolerance) return r <= kSetTolerance;
      return r <= std::exp(-c / x[0]) + kSetTolerance;
    };
  } else {  // square_minus_segment
    if (dim != 2) throw PreconditionError("square_minus_segment is defined in dimension 2 only");
    d.complement = [](const Point& x) {
      if (std::max(std::abs(x[0]), std::abs(x[1])) >= 1.0 - kSetTolerance) return true;
      return std::abs(x[1]) <= kSetTolerance && x[0] <= kSetTolerance && x[0] >= -0.5 - kSetTolerance;
    };
  }
  return d;
}

/// Sorted node indices.
using NodeSet = std::vector<std::size_t>;

/// Nodes x with x in E^c and |x - y| <= rho.
inline NodeSet rasterize_obstacle(const DomainSpec& domain, const BoundaryPoint& bp, double rho,
                                  const Grid& grid) {
  if (grid.size() == 0) throw PreconditionError("cannot rasterize on an empty grid");
  if (grid.dim != domain.dim) throw PreconditionError("grid and domain dimensions differ");
  if (!grid.contains_ball(bp.y, rho)) throw PreconditionError("closed ball of radius " + format_real(rho) +
                                                              " is not inside the grid box");
  NodeSet k;
  const double reach = rho * (1.0 + 1e-12);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point x = grid.point(i);
    if (distance(x, bp.y, grid.dim) <= reach && domain.in_complement(x)) k.push_back(i);
  }
  return k;
}

/// Nodes of E (complement predicate false).
inline std::vector<bool> domain_mask(const DomainSpec& domain, const Grid& grid) {
  std::vector<bool> in_e(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) in_e[i] = !domain.in_complement(grid.point(i));
  return in_e;
}

struct CutoffSpec {
  Point center{0.0, 0.0, 0.0};
  double r = 0.0;  ///< inner radius; support is the closed ball of radius 2r
};

inline double cutoff_value(const CutoffSpec& spec, const Point& x, int dim) {
  const double t = distance(x, spec.center, dim) / spec.r;
  return std::clamp(2.0 - t, 0.0, 1.0);
}

/// 1 on B_r(z), linear in |x - z| down to 0 at 2r.
inline GridFunction standard_cutoff(const CutoffSpec& spec, const Grid& grid) {
  if (!(spec.r >= grid.h)) {
    throw PreconditionError("cutoff outer radius " + format_real(2.0 * spec.r) + " is below twice the spacing");
  }
  if (!grid.contains_ball(spec.center, 2.0 * spec.r)) throw PreconditionError("cutoff support leaves the grid box");
  GridFunction f(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) f.values[i] = cutoff_value(spec, grid.point(i), grid.dim);
  return f;
}

}  // namespace wienergauge
