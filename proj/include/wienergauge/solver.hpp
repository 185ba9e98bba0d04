#pragma once

// Dirichlet problems for the p-Laplacian on rasterized domains, boundary
// oscillation of the solutions and the normalized pair (w, v) built near a
// boundary point.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "wienergauge/energy.hpp"
#include "wienergauge/errors.hpp"
#include "wienergauge/geometry.hpp"
#include "wienergauge/grid.hpp"

namespace wienergauge {

using Datum = std::function<double(const Point&)>;

struct DirichletProblem {
  DomainSpec domain;
  Datum g;
  double p = 2.0;
  Grid grid;
  SolverOptions opts;
};

struct SolveResult {
  GridFunction u;
  double energy = 0.0;  ///< unregularized discrete energy over all cells
  int iterations = 0;
  double residual = 0.0;
  std::pair<double, double> range{0.0, 0.0};
};

/// The domain with empty complement: E is the whole box.
inline DomainSpec unobstructed(int dim) {
  if (dim < 2 || dim > kMaxDim) throw PreconditionError("dimension must be 2 or 3");
  DomainSpec d;
  d.dim = dim;
  d.name = "box";
  d.complement = [](const Point&) { return false; };
  return d;
}

/// Nodes of E^c with an axis neighbour in E.
inline std::vector<bool> boundary_nodes(const Grid& grid, const std::vector<bool>& in_e) {
  std::vector<bool> out(grid.size(), false);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (in_e[i]) continue;
    const Index idx = grid.unravel(i);
    for (int k = 0; k < grid.dim && !out[i]; ++k) {
      for (int s = -1; s <= 1; s += 2) {
        Index j = idx;
        j[k] += s;
        if (j[k] < 0 || j[k] >= grid.counts[k]) continue;
        if (in_e[grid.index(j)]) {
          out[i] = true;
          break;
        }
      }
    }
  }
  return out;
}

/// Minimizes the p-energy over the nodes of E off the box boundary, with u
/// fixed to g on E^c and on the box boundary.  Starts from g.
inline SolveResult solve_p_laplace(const DirichletProblem& prob) {
  const Grid& grid = prob.grid;
  if (!(prob.p > 1.0)) throw PreconditionError("exponent p must exceed 1");
  if (grid.dim != prob.domain.dim) throw PreconditionError("grid and domain dimensions differ");
  if (!prob.g) throw PreconditionError("boundary datum is missing");
  prob.opts.validate();
  GridFunction u(grid);
  bool any_e = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point x = grid.point(i);
    const double gx = prob.g(x);
    if (!std::isfinite(gx)) throw PreconditionError("boundary datum is not finite at a grid node");
    u.values[i] = gx;
    const bool in_e = !prob.domain.in_complement(x);
    any_e = any_e || in_e;
    if (!in_e || grid.on_box_boundary(i)) u.mask[i] = NodeRole::fixed_value;
  }
  if (!any_e) throw PreconditionError("domain contains no grid node");

  SolveResult res;
  const MinimizeReport rep = minimize_p_energy(grid, u.values, u.mask, prob.p, prob.opts);
  res.iterations = rep.iterations;
  res.residual = rep.residual;
  res.energy = discrete_energy(grid, u.values, prob.p);
  const auto [lo, hi] = std::minmax_element(u.values.begin(), u.values.end());
  res.range = {*lo, *hi};
  res.u = std::move(u);
  return res;
}

namespace detail {

inline bool in_ball(const Grid& g, std::size_t i, const Point& y, double r) {
  return distance(g.point(i), y, g.dim) < r;
}

}  // namespace detail

/// max - min of u over the nodes of E within B_rho(y), per radius; 0 when no
/// node qualifies.
inline std::vector<double> measure_boundary_oscillation(const GridFunction& u, const DomainSpec& domain,
                                                        const Point& y, const std::vector<double>& radii) {
  const Grid& g = u.grid;
  for (double r : radii)
    if (!(r > 0.0) || !g.contains_ball(y, r * (1.0 - 1e-12)))
      throw PreconditionError("radius " + format_real(r) + " leaves the grid box");
  const std::vector<bool> in_e = domain_mask(domain, g);
  std::vector<double> out;
  out.reserve(radii.size());
  for (double r : radii) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!in_e[i] || !detail::in_ball(g, i, y, r)) continue;
      lo = std::min(lo, u.values[i]);
      hi = std::max(hi, u.values[i]);
    }
    out.push_back(hi >= lo ? hi - lo : 0.0);
  }
  return out;
}

struct NormalizedPair {
  std::optional<GridFunction> w;
  std::optional<GridFunction> v;
  double quarter_osc = 0.0;
  std::optional<double> short_circuit;
  /// -1 when u and g were negated to reach the first alternative.
  int sign = 1;
  double sup_2rho = 0.0;  ///< sup of sign*u over E within B_{2 rho}
  double sup_rho = 0.0;   ///< sup of sign*u over E within B_rho
};

/// Tests the two alternatives
///   sup u - osc/4 > sup g,   inf u + osc/4 < inf g
/// (extrema of u over E within B_{2 rho}(y), of g over the boundary nodes
/// there).  When neither holds the result is the short circuit 2 osc g.
/// Otherwise, after negating u and g if only the second holds,
///   w = (u - (sup u - osc/4))_+ / (osc/4)  on E, 0 on E^c,   v = 1 - w.
inline NormalizedPair normalize_near_boundary(const GridFunction& u, const DomainSpec& domain, const Point& y,
                                              double rho, const Datum& g) {
  const Grid& grid = u.grid;
  if (!(rho > 0.0) || !grid.contains_ball(y, 2.0 * rho * (1.0 - 1e-12)))
    throw PreconditionError("ball of radius 2 rho leaves the grid box");
  const std::vector<bool> in_e = domain_mask(domain, grid);
  const std::vector<bool> bdry = boundary_nodes(grid, in_e);
  const double inf = std::numeric_limits<double>::infinity();
  double u_hi = -inf, u_lo = inf, g_hi = -inf, g_lo = inf;
  double u_hi_rho = -inf, u_lo_rho = inf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!detail::in_ball(grid, i, y, 2.0 * rho)) continue;
    if (in_e[i]) {
      u_hi = std::max(u_hi, u.values[i]);
      u_lo = std::min(u_lo, u.values[i]);
      if (detail::in_ball(grid, i, y, rho)) {
        u_hi_rho = std::max(u_hi_rho, u.values[i]);
        u_lo_rho = std::min(u_lo_rho, u.values[i]);
      }
    } else if (bdry[i]) {
      const double gx = g(grid.point(i));
      g_hi = std::max(g_hi, gx);
      g_lo = std::min(g_lo, gx);
    }
  }
  if (!(u_hi >= u_lo)) throw PreconditionError("no node of E within B_{2 rho}");
  const double osc_g = g_hi >= g_lo ? g_hi - g_lo : 0.0;
  const double osc = u_hi - u_lo;

  NormalizedPair out;
  out.quarter_osc = 0.25 * osc;
  if (!(osc > 0.0)) {
    out.short_circuit = 2.0 * osc_g;
    return out;
  }
  // With no boundary node in the ball the datum places no constraint.
  const bool first = !(g_hi >= g_lo) || u_hi - 0.25 * osc > g_hi;
  const bool second = !(g_hi >= g_lo) || u_lo + 0.25 * osc < g_lo;
  if (!first && !second) {
    out.short_circuit = 2.0 * osc_g;
    return out;
  }
  out.sign = first ? 1 : -1;
  const double s = out.sign;
  const double top = first ? u_hi : -u_lo;
  out.sup_2rho = top;
  out.sup_rho = first ? u_hi_rho : -u_lo_rho;
  const double level = top - out.quarter_osc;

  GridFunction w(grid);
  GridFunction v(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double wi = 0.0;
    if (in_e[i]) wi = std::clamp((s * u.values[i] - level) / out.quarter_osc, 0.0, 1.0);
    w.values[i] = wi;
    v.values[i] = 1.0 - wi;
    w.mask[i] = v.mask[i] = u.mask[i];
  }
  out.w = std::move(w);
  out.v = std::move(v);
  return out;
}

}  // namespace wienergauge
