#pragma once

// Empirical constants for the energy inequalities used in the oscillation
// estimate.  Each check evaluates both sides on a grid function and reports
// their quotient.  Gradients and cell values use the cell stencil of the
// solvers: |grad f|^p = s^{p/2} with s the cell's squared discrete gradient,
// f at a cell = mean of its corners.

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "wienergauge/capacity.hpp"
#include "wienergauge/energy.hpp"
#include "wienergauge/errors.hpp"
#include "wienergauge/format.hpp"
#include "wienergauge/geometry.hpp"
#include "wienergauge/solver.hpp"

namespace wienergauge {

struct IneqReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  std::string witness;
  double h = 0.0;
  std::string flags;  ///< ';'-separated: degenerate, infinite, q1_instance

  bool degenerate() const { return flags.find("degenerate") != std::string::npos; }
  bool infinite() const { return flags.find("infinite") != std::string::npos; }
};

/// Negative values down to this are treated as rounding and clipped to 0.
inline constexpr double kSignSlack = 1e-8;

namespace detail {

inline void add_flag(IneqReport& r, const std::string& f) {
  if (!r.flags.empty()) r.flags += ';';
  r.flags += f;
}

inline void finish(IneqReport& r) {
  if (r.rhs > 0.0) {
    r.ratio = r.lhs / r.rhs;
  } else if (r.lhs > 0.0) {
    r.ratio = std::numeric_limits<double>::infinity();
    add_flag(r, "infinite");
  } else {
    r.ratio = 0.0;
    add_flag(r, "degenerate");
  }
  add_flag(r, "q1_instance");
}

inline std::string describe_cutoff(const CutoffSpec& c, int dim) {
  std::string s = "cutoff(r=" + format_real(c.r) + ",z=";
  for (int k = 0; k < dim; ++k) s += (k ? " " : "") + format_real(c.center[k]);
  return s + ")";
}

inline double pow_grad(double s, double p) { return std::pow(s, 0.5 * p); }

}  // namespace detail

/// Largest ratio over the cutoff family of
///   sum_cells h^N |grad(u + shift)|^p phi^p  /  sum_cells h^N (u + shift)^p |grad phi|^p,
/// over cells centred in E.  The cutoffs must be supported in B_rho(y) and
/// u must be non-negative on the nodes of E there.
inline IneqReport caccioppoli_ratio(const GridFunction& u, const DomainSpec& domain, const Point& y, double rho,
                                    double p, const std::vector<CutoffSpec>& cutoffs, double h_shift = 0.0,
                                    const std::string& name = "eq21") {
  if (cutoffs.empty()) throw PreconditionError("no cutoff functions supplied");
  if (!(h_shift >= 0.0)) throw PreconditionError("shift must be non-negative");
  if (!(p > 1.0)) throw PreconditionError("exponent p must exceed 1");
  const Grid& grid = u.grid;
  const int dim = grid.dim;
  for (const auto& c : cutoffs)
    if (distance(c.center, y, dim) + 2.0 * c.r > rho * (1.0 + 1e-9))
      throw PreconditionError("cutoff support leaves B_rho(y)");
  std::vector<double> vals = u.values;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (domain.in_complement(grid.point(i)) || !(distance(grid.point(i), y, dim) < rho)) continue;
    if (vals[i] < -kSignSlack) throw PreconditionError("function is negative in E within B_rho(y)");
  }
  for (double& x : vals) x = std::max(x, 0.0) + h_shift;

  const std::vector<double> s_u = cell_gradient_squared(grid, vals);
  const std::vector<double> m_u = cell_means(grid, vals);
  const std::vector<Point> centers = cell_centers(grid);
  const double hN = std::pow(grid.h, dim);

  IneqReport best;
  bool have = false;
  for (const auto& c : cutoffs) {
    const GridFunction phi = standard_cutoff(c, grid);
    const std::vector<double> s_phi = cell_gradient_squared(grid, phi.values);
    const std::vector<double> m_phi = cell_means(grid, phi.values);
    IneqReport r;
    r.name = name;
    r.h = grid.h;
    r.witness = detail::describe_cutoff(c, dim) + " shift=" + format_real(h_shift);
    for (std::size_t k = 0; k < centers.size(); ++k) {
      if (domain.in_complement(centers[k])) continue;
      if (m_phi[k] == 0.0 && s_phi[k] == 0.0) continue;
      r.lhs += hN * detail::pow_grad(s_u[k], p) * std::pow(m_phi[k], p);
      r.rhs += hN * std::pow(m_u[k], p) * detail::pow_grad(s_phi[k], p);
    }
    detail::finish(r);
    const bool better = !have || r.ratio > best.ratio || (best.degenerate() && !r.degenerate());
    if (better) best = r;
    have = true;
  }
  return best;
}

/// (mean of v^eps over B_rho(y))^{1/eps} / min of v over B_rho(y).
inline IneqReport weak_harnack_ratio(const GridFunction& v, const Point& y, double rho, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("exponent eps must lie in (0,1)");
  const Grid& grid = v.grid;
  double sum = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = distance(grid.point(i), y, grid.dim);
    if (d < 2.0 * rho && v.values[i] < -kSignSlack) throw PreconditionError("function is negative in B_{2 rho}(y)");
    if (!(d < rho)) continue;
    const double x = std::max(v.values[i], 0.0);
    sum += std::pow(x, eps);
    lo = std::min(lo, x);
    ++count;
  }
  if (count == 0) throw PreconditionError("no grid node within B_rho(y)");
  IneqReport r;
  r.name = "eq25";
  r.h = grid.h;
  r.witness = "ball(rho=" + format_real(rho) + ") eps=" + format_real(eps);
  r.lhs = std::pow(sum / static_cast<double>(count), 1.0 / eps);
  r.rhs = lo;
  detail::finish(r);
  return r;
}

/// mean over B_{2 rho}(y) of v^eps against ((sup_{2 rho} u - sup_rho u) / (osc/4))^eps,
/// with the sups and osc recorded by normalize_near_boundary.  The witness
/// carries gamma = ratio^{1/eps}.
inline IneqReport sup_drop_check(const NormalizedPair& pair, const Point& y, double rho, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("exponent eps must lie in (0,1)");
  IneqReport r;
  r.name = "eq33";
  if (pair.short_circuit || !pair.v || !(pair.quarter_osc > 0.0)) {
    r.witness = "short_circuit";
    detail::finish(r);
    return r;
  }
  const GridFunction& v = *pair.v;
  const Grid& grid = v.grid;
  r.h = grid.h;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(distance(grid.point(i), y, grid.dim) < 2.0 * rho)) continue;
    sum += std::pow(std::max(v.values[i], 0.0), eps);
    ++count;
  }
  if (count == 0) throw PreconditionError("no grid node within B_{2 rho}(y)");
  r.lhs = sum / static_cast<double>(count);
  r.rhs = std::pow(std::max(pair.sup_2rho - pair.sup_rho, 0.0) / pair.quarter_osc, eps);
  detail::finish(r);
  r.witness = "ball(rho=" + format_real(rho) + ") eps=" + format_real(eps) +
              " gamma=" + format_real(std::isfinite(r.ratio) ? std::pow(r.ratio, 1.0 / eps) : r.ratio);
  return r;
}

/// sum h^N v^{-q} |grad v|^p zeta^p  /  sum h^N v^{p-q} |grad zeta|^p over all
/// cells, for p_0 <= q < p.  v must be positive on the support of zeta.
inline IneqReport negative_power_check(const GridFunction& v, const CutoffSpec& zeta, double p, double q, double p_0) {
  if (!(p > 1.0)) throw PreconditionError("exponent p must exceed 1");
  if (!(q >= p_0 && q < p)) {
    throw PreconditionError("q = " + format_real(q) + " outside [" + format_real(p_0) + ", " + format_real(p) + ")");
  }
  const Grid& grid = v.grid;
  const GridFunction z = standard_cutoff(zeta, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (distance(grid.point(i), zeta.center, grid.dim) <= 2.0 * zeta.r + grid.h * std::sqrt(grid.dim) &&
        !(v.values[i] > 0.0))
      throw PreconditionError("function is not positive on the cutoff support; add a positive shift");
  }
  const std::vector<double> s_v = cell_gradient_squared(grid, v.values);
  const std::vector<double> m_v = cell_means(grid, v.values);
  const std::vector<double> s_z = cell_gradient_squared(grid, z.values);
  const std::vector<double> m_z = cell_means(grid, z.values);
  const double hN = std::pow(grid.h, grid.dim);
  IneqReport r;
  r.name = "eq34";
  r.h = grid.h;
  r.witness = detail::describe_cutoff(zeta, grid.dim) + " q=" + format_real(q);
  for (std::size_t k = 0; k < m_v.size(); ++k) {
    if (m_z[k] == 0.0 && s_z[k] == 0.0) continue;
    r.lhs += hN * std::pow(m_v[k], -q) * detail::pow_grad(s_v[k], p) * std::pow(m_z[k], p);
    r.rhs += hN * std::pow(m_v[k], p - q) * detail::pow_grad(s_z[k], p);
  }
  detail::finish(r);
  return r;
}

/// Capacity of E^c within closed B_rho(y), relative to B_{2 rho}(y) and
/// computed on v's grid, against rho^{-p} sum_{B_{2 rho}} h^N v^eps.
inline IneqReport capacity_lower_bound_check(const GridFunction& v, const DomainSpec& domain, const Point& y,
                                             double rho, double p, double eps, const SolverOptions& opts = {}) {
  if (!(eps > 0.0 && eps <= 1.0)) throw PreconditionError("exponent eps must lie in (0,1]");
  const Grid& grid = v.grid;
  IneqReport r;
  r.name = "cap_lb";
  r.h = grid.h;
  r.witness = "outer=" + format_real(2.0 * rho) + " eps=" + format_real(eps);
  const BoundaryPoint bp{y, grid.dim};
  const NodeSet k = rasterize_obstacle(domain, bp, rho, grid);
  if (!k.empty()) r.lhs = estimate_capacity(k, p, grid, opts, 2.0 * rho, y).value;
  const double hN = std::pow(grid.h, grid.dim);
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (distance(grid.point(i), y, grid.dim) < 2.0 * rho) sum += hN * std::pow(std::max(v.values[i], 0.0), eps);
  r.rhs = sum / std::pow(rho, p);
  detail::finish(r);
  return r;
}

/// CSV name,lhs,rhs,ratio,witness,h,flags.
inline void write_csv(std::ostream& os, const std::vector<IneqReport>& reports, bool header = true) {
  if (header) os << "name,lhs,rhs,ratio,witness,h,flags\n";
  for (const auto& r : reports) {
    os << r.name << ',' << format_real(r.lhs) << ',' << format_real(r.rhs) << ',' << format_real(r.ratio) << ','
       << r.witness << ',' << format_real(r.h) << ',' << r.flags << '\n';
  }
}

/// Setup of the standard inequality suite around a boundary point.
struct SuiteConfig {
  DomainSpec domain;
  Point y{0.0, 0.0, 0.0};
  double p = 2.0;
  double rho = 0.25;  ///< u vanishes on the boundary within B_rho(y)
  double eps = 0.5;
  double q = 0.0;       ///< exponent for the v^{-q} check; 0 selects p - eps_cap
  double p_0 = 0.0;     ///< lower end for q; 0 selects the calibrated value
  double v_shift = 0.1;  ///< positive shift for the v^{-q} check
  std::vector<double> h_shifts{0.01, 0.1, 1.0};
  std::vector<double> levels{0.25, 0.5, 0.75};
  SolverOptions opts;
};

/// Standard cutoffs inside B_rho(y): radii rho/2 and rho/4 about y and
/// radius rho/4 about the interior point y + (rho/2) e_N.
inline std::vector<CutoffSpec> standard_cutoffs(const Point& y, double rho, int dim) {
  Point z = y;
  z[dim - 1] += 0.5 * rho;
  return {CutoffSpec{y, 0.5 * rho}, CutoffSpec{y, 0.25 * rho}, CutoffSpec{z, 0.25 * rho}};
}

/// Runs every check on a solution u with datum g vanishing on the boundary
/// within B_rho(y).  The normalized pair is built over B_rho(y), that is
/// with inner radius rho/2.
inline std::vector<IneqReport> inequality_suite(const GridFunction& u, const Datum& g, const SuiteConfig& cfg,
                                                double eps_cap, double p_0) {
  const int dim = u.grid.dim;
  std::vector<IneqReport> out;
  const auto cutoffs = standard_cutoffs(cfg.y, cfg.rho, dim);
  out.push_back(caccioppoli_ratio(u, cfg.domain, cfg.y, cfg.rho, cfg.p, cutoffs, 0.0, "eq21"));
  for (double hs : cfg.h_shifts)
    out.push_back(caccioppoli_ratio(u, cfg.domain, cfg.y, cfg.rho, cfg.p, cutoffs, hs, "eq23"));

  const double r_half = 0.5 * cfg.rho;
  const NormalizedPair pair = normalize_near_boundary(u, cfg.domain, cfg.y, r_half, g);
  if (!pair.v) {
    IneqReport r;
    r.name = "eq33";
    r.h = u.grid.h;
    r.witness = "short_circuit=" + format_real(*pair.short_circuit);
    detail::finish(r);
    out.push_back(r);
    return out;
  }
  const GridFunction& v = *pair.v;
  const DomainSpec whole = unobstructed(dim);
  for (double k : cfg.levels) {
    GridFunction vk = v;
    for (double& x : vk.values) x = std::max(k - x, 0.0);
    IneqReport r = caccioppoli_ratio(vk, whole, cfg.y, cfg.rho, cfg.p, cutoffs, 0.0, "eq32");
    r.witness += " k=" + format_real(k);
    out.push_back(r);
  }
  out.push_back(weak_harnack_ratio(v, cfg.y, r_half, cfg.eps));
  out.push_back(sup_drop_check(pair, cfg.y, r_half, cfg.eps));
  GridFunction vs = v;
  for (double& x : vs.values) x += cfg.v_shift;
  const double q = cfg.q > 0.0 ? cfg.q : cfg.p - eps_cap;
  const double lo = cfg.p_0 > 0.0 ? cfg.p_0 : p_0;
  IneqReport r34 = negative_power_check(vs, CutoffSpec{cfg.y, r_half}, cfg.p, q, lo);
  r34.witness += " shift=" + format_real(cfg.v_shift);
  out.push_back(r34);
  out.push_back(capacity_lower_bound_check(v, cfg.domain, cfg.y, r_half, cfg.p, cfg.eps, cfg.opts));
  return out;
}

/// Largest finite constant in a suite; the sup-drop ratio is raised to 1/eps first.
inline double suite_constant(const std::vector<IneqReport>& reports, double eps) {
  double best = 1.0;
  for (const auto& r : reports) {
    if (!std::isfinite(r.ratio)) continue;
    const double c = r.name == "eq33" && r.ratio > 0.0 ? std::pow(r.ratio, 1.0 / eps) : r.ratio;
    best = std::max(best, c);
  }
  return best;
}

}  // namespace wienergauge
