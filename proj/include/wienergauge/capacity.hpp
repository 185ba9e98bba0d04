#pragma once

// Condenser p-capacity of rasterized compact sets.
//
// The capacity of K relative to the ball B_R(center) is the minimum of the
// discrete p-energy over grid functions equal to 1 on K and 0 on the box
// boundary and at every node with |x - center| >= R.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wienergauge/energy.hpp"
#include "wienergauge/errors.hpp"
#include "wienergauge/geometry.hpp"
#include "wienergauge/grid.hpp"
#include "wienergauge/profile.hpp"

namespace wienergauge {

/// Area of the unit (N-1)-sphere.
inline double sphere_area(int dim) {
  switch (dim) {
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    default: throw PreconditionError("dimension must be 2 or 3");
  }
}

/// int_a^b r^{-(N-1)/(p-1)} dr by adaptive Gauss-Kronrod in s = ln r.
inline double radial_resistance(double p, int dim, double a, double b) {
  if (a == b) return 0.0;
  const double k = (dim - 1) / (p - 1.0);
  auto integrand = [k](double s) { return std::exp((1.0 - k) * s); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, std::log(a), std::log(b), 5,
                                                                        1e-12);
}

/// Capacity of the spherical condenser (closed B_a, B_b), from the radial
/// Euler equation (r^{N-1} |u'|^{p-2} u')' = 0 integrated by quadrature.
inline double radial_condenser_capacity(double p, int dim, double a, double b) {
  if (dim != 2 && dim != 3) throw PreconditionError("dimension must be 2 or 3");
  if (!(a > 0.0 && a < b)) throw PreconditionError("radial condenser needs 0 < a < b");
  if (!(p > 1.0 && p <= dim)) throw PreconditionError("exponent p must lie in (1, N]");
  return sphere_area(dim) * std::pow(radial_resistance(p, dim, a, b), 1.0 - p);
}

/// Capacitary potential of the spherical condenser at radius r.
inline double radial_potential(double p, int dim, double a, double b, double r) {
  if (r <= a) return 1.0;
  if (r >= b) return 0.0;
  return radial_resistance(p, dim, r, b) / radial_resistance(p, dim, a, b);
}

/// Converts a capacity relative to B_{r_from} into one relative to B_{r_to}
/// by matching the spherical condenser with the same capacity.  Exact for
/// balls; for other sets it adds the radial resistance of the shell between
/// the two outer radii.
inline double transfer_outer_radius(double capacity, double p, int dim, double r_from, double r_to) {
  if (capacity <= 0.0 || r_from == r_to) return capacity;
  const double omega = sphere_area(dim);
  const double resistance = std::pow(capacity / omega, 1.0 / (1.0 - p));
  const double shell = r_to > r_from ? radial_resistance(p, dim, r_from, r_to) : -radial_resistance(p, dim, r_to, r_from);
  return omega * std::pow(resistance + shell, 1.0 - p);
}

struct CapacityResult {
  double value = 0.0;
  std::vector<std::pair<double, double>> per_level;  ///< (h, value)
  double extrapolated = 0.0;
  double order_estimate = 0.0;  ///< 0 when a single level was computed
  int iterations = 0;
  double residual = 0.0;
  /// Capacitary potential on the finest level.
  GridFunction potential;
  double outer_radius = 0.0;
};

/// Flat record: value,extrapolated,order,levels,iterations,residual
inline void write_record(std::ostream& os, const CapacityResult& r, bool header = true) {
  if (header) os << "value,extrapolated,order,levels,iterations,residual\n";
  os << format_real(r.value) << ',' << format_real(r.extrapolated) << ',' << format_real(r.order_estimate) << ','
     << r.per_level.size() << ',' << r.iterations << ',' << format_real(r.residual) << '\n';
}

struct Extrapolation {
  double value = 0.0;
  double order = 0.0;
};

/// Richardson extrapolation over levels with spacing halving each time.
/// Three or more levels estimate the order from the last three (clamped to
/// [0.5, 4]); otherwise, or when the differences change sign or grow, first
/// order is assumed from the last two.
inline Extrapolation richardson(const std::vector<std::pair<double, double>>& levels) {
  if (levels.empty()) throw PreconditionError("no levels to extrapolate");
  const std::size_t n = levels.size();
  if (n == 1) return {levels[0].second, 0.0};
  const double v1 = levels[n - 2].second;
  const double v2 = levels[n - 1].second;
  double order = 1.0;
  if (n >= 3) {
    const double v0 = levels[n - 3].second;
    const double d1 = v0 - v1;
    const double d2 = v1 - v2;
    if (d1 * d2 > 0.0 && std::abs(d2) < std::abs(d1)) order = std::clamp(std::log2(d1 / d2), 0.5, 4.0);
  }
  const double value = v2 + (v2 - v1) / (std::exp2(order) - 1.0);
  return {std::max(value, 0.0), order};
}

/// Capacity of K relative to B_R(center) on a single grid.  A negative
/// outer radius means the largest ball about `center` inside the box.
inline CapacityResult estimate_capacity(const NodeSet& k, double p, const Grid& grid, const SolverOptions& opts,
                                        double outer_radius = -1.0, std::optional<Point> center = std::nullopt) {
  opts.validate();
  if (!(p > 1.0 && p <= grid.dim)) throw PreconditionError("exponent p must lie in (1, N]");
  const Point c = center.value_or(grid.center());
  const double r_out = outer_radius < 0.0 ? grid.inscribed_radius(c) : outer_radius;
  if (r_out > grid.inscribed_radius(c) * (1.0 + 1e-12))
    throw PreconditionError("outer ball of radius " + format_real(r_out) + " leaves the grid box");

  CapacityResult res;
  res.outer_radius = r_out;
  GridFunction psi(grid, 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.on_box_boundary(i))
      psi.mask[i] = NodeRole::fixed_zero;
    else if (distance(grid.point(i), c, grid.dim) >= r_out * (1.0 - 1e-12))
      psi.mask[i] = NodeRole::exterior;
  }
  for (std::size_t i : k) {
    if (i >= grid.size()) throw PreconditionError("obstacle node index outside the grid");
    psi.mask[i] = NodeRole::fixed_one;
    psi.values[i] = 1.0;
  }
  if (!k.empty()) {
    const MinimizeReport rep = minimize_p_energy(grid, psi.values, psi.mask, p, opts);
    res.iterations = rep.iterations;
    res.residual = rep.residual;
    res.value = discrete_energy(grid, psi.values, p);
  }
  res.extrapolated = res.value;
  res.per_level = {{grid.h, res.value}};
  res.potential = std::move(psi);
  return res;
}

/// Rasterizes on `levels` successively halved grids and extrapolates.
inline CapacityResult estimate_capacity(const std::function<NodeSet(const Grid&)>& rasterize, double p,
                                        const Grid& coarsest, const SolverOptions& opts, double outer_radius = -1.0,
                                        std::optional<Point> center = std::nullopt) {
  opts.validate();
  CapacityResult out;
  Grid g = coarsest;
  for (int level = 0; level < opts.levels; ++level) {
    if (level > 0) g = refine(g);
    if (g.size() > kDefaultNodeBudget) throw BudgetError(g.size(), kDefaultNodeBudget);
    CapacityResult r = estimate_capacity(rasterize(g), p, g, opts, outer_radius, center);
    out.per_level.emplace_back(g.h, r.value);
    out.iterations += r.iterations;
    out.residual = r.residual;
    out.value = r.value;
    out.outer_radius = r.outer_radius;
    out.potential = std::move(r.potential);
  }
  const Extrapolation ex = richardson(out.per_level);
  out.extrapolated = ex.value;
  out.order_estimate = ex.order;
  return out;
}

/// Outer radius used for relative capacities; capacities computed inside a
/// smaller ball are transferred to it.
inline constexpr double kReferenceOuterRadius = 2.0;

struct RelativeCapacity {
  double delta = 0.0;
  double capacity = 0.0;      ///< relative to B_2(y), after any transfer
  double raw_capacity = 0.0;  ///< relative to B_{outer_radius}(y)
  double outer_radius = 0.0;
  CapacityResult detail;
};

/// delta_y(rho) = c_p[E^c within closed B_rho(y), relative to B_2(y)] / rho^{N-p}.
/// The outer ball is B_2(y) when the grid box contains it; otherwise the
/// largest ball inside the box, followed by transfer_outer_radius.  With
/// opts.levels > 1 the extrapolated capacity is used.
inline RelativeCapacity relative_capacity(const DomainSpec& domain, const BoundaryPoint& y, double rho, double p,
                                          const Grid& grid, const SolverOptions& opts) {
  if (!(rho > 0.0 && rho < 1.0)) throw PreconditionError("radius rho must lie in (0,1)");
  if (!(p > 1.0 && p <= domain.dim)) throw PreconditionError("exponent p must lie in (1, N]");
  if (grid.dim != domain.dim) throw PreconditionError("grid and domain dimensions differ");
  const double r_out = std::min(kReferenceOuterRadius, grid.inscribed_radius(y.y));
  if (!(r_out > rho)) throw PreconditionError("grid box does not leave room around the obstacle ball");
  auto raster = [&](const Grid& g) { return rasterize_obstacle(domain, y, rho, g); };
  RelativeCapacity out;
  out.outer_radius = r_out;
  out.detail = opts.levels > 1 ? estimate_capacity(raster, p, grid, opts, r_out, y.y)
                               : estimate_capacity(raster(grid), p, grid, opts, r_out, y.y);
  out.raw_capacity = opts.levels > 1 ? out.detail.extrapolated : out.detail.value;
  out.capacity = transfer_outer_radius(out.raw_capacity, p, domain.dim, r_out, kReferenceOuterRadius);
  out.delta = out.capacity / std::pow(rho, domain.dim - p);
  return out;
}

/// Per-radius grid selection for delta profiles: spacing t / nodes_per_radius
/// and a box of half-width min(2, m h) with at most max_nodes_per_axis nodes.
struct GridPolicy {
  int nodes_per_radius = 4;
  std::int64_t max_nodes_per_axis = 0;  ///< 0 selects 257 (N = 2) or 65 (N = 3)

  std::int64_t axis_cap(int dim) const {
    if (max_nodes_per_axis > 0) return max_nodes_per_axis;
    return dim == 2 ? 257 : 65;
  }

  Grid grid_for(int dim, const BoundaryPoint& y, double t) const {
    if (nodes_per_radius < 2) throw PreconditionError("grid policy needs at least 2 nodes per radius");
    const double h = t / nodes_per_radius;
    const auto m_max = (axis_cap(dim) - 1) / 2;
    const auto m_needed = static_cast<std::int64_t>(std::ceil(kReferenceOuterRadius / h - 1e-9));
    const auto m = std::min(m_max, m_needed);
    if (static_cast<double>(m) * h <= t * (1.0 + 1e-9))
      throw PreconditionError("grid policy leaves no room outside the obstacle ball");
    return make_grid(dim, y.y, static_cast<double>(m) * h, h);
  }
};

/// Relative capacity at each radius (strictly decreasing, in (0,1)).
inline DeltaProfile delta_profile(const DomainSpec& domain, const BoundaryPoint& y, double p,
                                  const std::vector<double>& radii, const GridPolicy& policy,
                                  const SolverOptions& opts) {
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0 && radii[i] < 1.0)) throw PreconditionError("profile radii must lie in (0,1)");
    if (i > 0 && !(radii[i] < radii[i - 1])) throw PreconditionError("profile radii must be strictly decreasing");
  }
  DeltaProfile prof;
  prof.p = p;
  prof.domain_label = domain.name;
  prof.noise_floor = std::max(1e-12, 100.0 * opts.tol);
  for (double t : radii) {
    const Grid g = policy.grid_for(domain.dim, y, t);
    const RelativeCapacity rc = relative_capacity(domain, y, t, p, g, opts);
    prof.entries.push_back({t, rc.delta});
    prof.grid_meta.push_back(g.describe() + " outer=" + format_real(rc.outer_radius));
  }
  return prof;
}

}  // namespace wienergauge
