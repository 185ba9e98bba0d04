#pragma once

// Discrete p-Dirichlet energy on the cells of a Grid and its minimization.
//
// On a cell with corners u_c the squared gradient magnitude is the mean,
// over the 2^{N-1} parallel edges of each axis, of the squared forward
// differences divided by h^2:
//
//   s = 2^{1-N} h^{-2} sum_{edges e} (u_hi(e) - u_lo(e))^2
//
// and the cell contributes h^N (eps^2 + s)^{p/2}.  At p = 2 the energy is
// h^{N-2} sum_edges (difference)^2, whose Euler equation is the standard
// 5-point (N = 2) or 7-point (N = 3) Laplacian.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "wienergauge/errors.hpp"
#include "wienergauge/grid.hpp"

namespace wienergauge {

struct SolverOptions {
  double tol = 1e-8;           ///< relative gradient norm at which a solve stops
  int max_iters = 500;         ///< Newton iterations, summed over continuation stages
  double eps_reg = -1.0;       ///< initial gradient regularization; negative means h
  int continuation_steps = 3;  ///< eps_reg is divided by 10 this many times
  int max_cg_iters = 20000;    ///< inner conjugate-gradient cap per Newton step
  int levels = 1;              ///< grid levels for capacity refinement studies

  void validate() const {
    if (!(tol > 0.0)) throw PreconditionError("solver tolerance must be positive");
    if (max_iters < 1) throw PreconditionError("max_iters must be at least 1");
    if (continuation_steps < 0) throw PreconditionError("continuation_steps must be non-negative");
    if (max_cg_iters < 1) throw PreconditionError("max_cg_iters must be at least 1");
    if (levels < 1) throw PreconditionError("levels must be at least 1");
  }
};

namespace detail {

template <int N>
struct CellStencil {
  static constexpr int kCorners = 1 << N;
  static constexpr int kEdges = N << (N - 1);
  static constexpr double kWeight = 1.0 / static_cast<double>(1 << (N - 1));

  std::array<std::ptrdiff_t, kCorners> offset{};
  std::array<std::uint8_t, kEdges> lo{};
  std::array<std::uint8_t, kEdges> hi{};

  explicit CellStencil(const Grid& g) {
    for (int c = 0; c < kCorners; ++c) {
      std::ptrdiff_t o = 0;
      for (int k = 0; k < N; ++k)
        if ((c >> k) & 1) o += static_cast<std::ptrdiff_t>(g.stride(k));
      offset[c] = o;
    }
    int e = 0;
    for (int k = 0; k < N; ++k)
      for (int c = 0; c < kCorners; ++c)
        if (!((c >> k) & 1)) {
          lo[e] = static_cast<std::uint8_t>(c);
          hi[e] = static_cast<std::uint8_t>(c | (1 << k));
          ++e;
        }
  }
};

/// Lower-corner node index of every cell, in storage order.
inline std::vector<std::size_t> cell_corners(const Grid& g) {
  std::vector<std::size_t> cells;
  cells.reserve(g.cell_count());
  Index i{0, 0, 0};
  Index last{0, 0, 0};
  for (int k = 0; k < g.dim; ++k) last[k] = g.counts[k] - 2;
  if (g.cell_count() == 0) return cells;
  for (i[0] = 0; i[0] <= last[0]; ++i[0])
    for (i[1] = 0; i[1] <= last[1]; ++i[1])
      for (i[2] = 0; i[2] <= last[2]; ++i[2]) cells.push_back(g.index(i));
  return cells;
}

template <int N>
class PEnergy {
 public:
  using Stencil = CellStencil<N>;

  PEnergy(const Grid& grid, std::span<const NodeRole> mask, double p, double eps)
      : grid_(grid), mask_(mask), st_(grid), p_(p), eps2_(eps * eps) {
    hN_ = std::pow(grid.h, N);
    k_ = 2.0 * Stencil::kWeight / (grid.h * grid.h);
    quadratic_ = (p == 2.0);
    for (std::size_t c : cell_corners(grid)) {
      bool active = false;
      for (int j = 0; j < Stencil::kCorners && !active; ++j) active = is_free(mask[c + st_.offset[j]]);
      if (active) cells_.push_back(c);
    }
  }

  void set_eps(double eps) { eps2_ = eps * eps; }
  std::size_t active_cells() const { return cells_.size(); }

  /// Energy of the cells that touch a free node.
  double energy(std::span<const double> u) const {
    double total = 0.0;
    std::array<double, Stencil::kEdges> d;
    for (std::size_t c : cells_) total += cell_energy(u, c, d);
    return total;
  }

  /// Writes the gradient (zero at fixed nodes) and returns the energy.
  double gradient(std::span<const double> u, std::span<double> g) const {
    std::fill(g.begin(), g.end(), 0.0);
    double total = 0.0;
    std::array<double, Stencil::kEdges> d;
    for (std::size_t c : cells_) {
      const double s = edge_differences(u, c, d);
      const double base = eps2_ + s;
      double f;
      double fp;
      if (quadratic_) {
        f = base;
        fp = 1.0;
      } else {
        const double pw = std::pow(base, 0.5 * p_ - 1.0);
        f = pw * base;
        fp = 0.5 * p_ * pw;
      }
      total += hN_ * f;
      const double a = hN_ * fp * k_;
      for (int e = 0; e < Stencil::kEdges; ++e) {
        const double t = a * d[e];
        g[c + st_.offset[st_.hi[e]]] += t;
        g[c + st_.offset[st_.lo[e]]] -= t;
      }
    }
    zero_fixed(g);
    return total;
  }

  /// Caches per-cell curvature coefficients at u and fills the Hessian
  /// diagonal (one at fixed nodes).
  void prepare_hessian(std::span<const double> u, std::span<double> diag) {
    coef_a_.resize(cells_.size());
    coef_b_.resize(cells_.size());
    std::fill(diag.begin(), diag.end(), 0.0);
    std::array<double, Stencil::kEdges> d;
    std::array<double, Stencil::kCorners> ds;
    for (std::size_t ci = 0; ci < cells_.size(); ++ci) {
      const std::size_t c = cells_[ci];
      const double s = edge_differences(u, c, d);
      const double base = eps2_ + s;
      double a;
      double b;
      if (quadratic_) {
        a = hN_;
        b = 0.0;
      } else {
        const double pw = std::pow(base, 0.5 * p_ - 2.0);
        a = hN_ * 0.5 * p_ * pw * base;
        b = hN_ * 0.5 * p_ * (0.5 * p_ - 1.0) * pw;
      }
      coef_a_[ci] = a;
      coef_b_[ci] = b;
      ds.fill(0.0);
      for (int e = 0; e < Stencil::kEdges; ++e) {
        ds[st_.hi[e]] += k_ * d[e];
        ds[st_.lo[e]] -= k_ * d[e];
      }
      // Each corner lies on exactly N edges of the cell.
      for (int j = 0; j < Stencil::kCorners; ++j) diag[c + st_.offset[j]] += a * k_ * N + b * ds[j] * ds[j];
    }
    for (std::size_t i = 0; i < diag.size(); ++i)
      if (!is_free(mask_[i]) || !(diag[i] > 0.0)) diag[i] = 1.0;
  }

  /// out = H v on free nodes, using coefficients from prepare_hessian(u).
  void hessian_times(std::span<const double> u, std::span<const double> v, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    std::array<double, Stencil::kEdges> d;
    std::array<double, Stencil::kEdges> dv;
    for (std::size_t ci = 0; ci < cells_.size(); ++ci) {
      const std::size_t c = cells_[ci];
      const double a = coef_a_[ci];
      const double b = coef_b_[ci];
      if (b == 0.0) {
        for (int e = 0; e < Stencil::kEdges; ++e) {
          const double t = a * k_ * (v[c + st_.offset[st_.hi[e]]] - v[c + st_.offset[st_.lo[e]]]);
          out[c + st_.offset[st_.hi[e]]] += t;
          out[c + st_.offset[st_.lo[e]]] -= t;
        }
        continue;
      }
      edge_differences(u, c, d);
      double sdot = 0.0;
      for (int e = 0; e < Stencil::kEdges; ++e) {
        dv[e] = v[c + st_.offset[st_.hi[e]]] - v[c + st_.offset[st_.lo[e]]];
        sdot += d[e] * dv[e];
      }
      const double bs = b * k_ * sdot;
      for (int e = 0; e < Stencil::kEdges; ++e) {
        const double t = k_ * (a * dv[e] + bs * d[e]);
        out[c + st_.offset[st_.hi[e]]] += t;
        out[c + st_.offset[st_.lo[e]]] -= t;
      }
    }
    zero_fixed(out);
  }

  void zero_fixed(std::span<double> v) const {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!is_free(mask_[i])) v[i] = 0.0;
  }

 private:
  double edge_differences(std::span<const double> u, std::size_t c, std::array<double, Stencil::kEdges>& d) const {
    std::array<double, Stencil::kCorners> uc;
    for (int j = 0; j < Stencil::kCorners; ++j) uc[j] = u[c + st_.offset[j]];
    double s = 0.0;
    for (int e = 0; e < Stencil::kEdges; ++e) {
      d[e] = uc[st_.hi[e]] - uc[st_.lo[e]];
      s += d[e] * d[e];
    }
    return 0.5 * k_ * s;
  }

  double cell_energy(std::span<const double> u, std::size_t c, std::array<double, Stencil::kEdges>& d) const {
    const double base = eps2_ + edge_differences(u, c, d);
    return hN_ * (quadratic_ ? base : std::pow(base, 0.5 * p_));
  }

  const Grid& grid_;
  std::span<const NodeRole> mask_;
  Stencil st_;
  double p_;
  double eps2_;
  double hN_ = 1.0;
  double k_ = 1.0;
  bool quadratic_ = false;
  std::vector<std::size_t> cells_;
  std::vector<double> coef_a_;
  std::vector<double> coef_b_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace detail

/// Energy sum over every cell of the grid: sum h^N (eps^2 + s)^{p/2}.
inline double discrete_energy(const Grid& grid, std::span<const double> u, double p, double eps = 0.0) {
  auto run = [&]<int N>() {
    detail::CellStencil<N> st(grid);
    const double k = 2.0 * detail::CellStencil<N>::kWeight / (grid.h * grid.h);
    const double hN = std::pow(grid.h, N);
    double total = 0.0;
    for (std::size_t c : detail::cell_corners(grid)) {
      double s = 0.0;
      for (int e = 0; e < detail::CellStencil<N>::kEdges; ++e) {
        const double d = u[c + st.offset[st.hi[e]]] - u[c + st.offset[st.lo[e]]];
        s += d * d;
      }
      total += hN * std::pow(eps * eps + 0.5 * k * s, 0.5 * p);
    }
    return total;
  };
  return grid.dim == 2 ? run.template operator()<2>() : run.template operator()<3>();
}

/// Squared discrete gradient magnitude on every cell, in cell_corners order.
inline std::vector<double> cell_gradient_squared(const Grid& grid, std::span<const double> u) {
  auto run = [&]<int N>() {
    detail::CellStencil<N> st(grid);
    const double k = 2.0 * detail::CellStencil<N>::kWeight / (grid.h * grid.h);
    std::vector<double> out;
    out.reserve(grid.cell_count());
    for (std::size_t c : detail::cell_corners(grid)) {
      double s = 0.0;
      for (int e = 0; e < detail::CellStencil<N>::kEdges; ++e) {
        const double d = u[c + st.offset[st.hi[e]]] - u[c + st.offset[st.lo[e]]];
        s += d * d;
      }
      out.push_back(0.5 * k * s);
    }
    return out;
  };
  return grid.dim == 2 ? run.template operator()<2>() : run.template operator()<3>();
}

/// Mean of the corner values of every cell, in cell_corners order.
inline std::vector<double> cell_means(const Grid& grid, std::span<const double> u) {
  auto run = [&]<int N>() {
    detail::CellStencil<N> st(grid);
    std::vector<double> out;
    out.reserve(grid.cell_count());
    for (std::size_t c : detail::cell_corners(grid)) {
      double s = 0.0;
      for (int j = 0; j < detail::CellStencil<N>::kCorners; ++j) s += u[c + st.offset[j]];
      out.push_back(s / detail::CellStencil<N>::kCorners);
    }
    return out;
  };
  return grid.dim == 2 ? run.template operator()<2>() : run.template operator()<3>();
}

/// Centres of every cell, in cell_corners order.
inline std::vector<Point> cell_centers(const Grid& grid) {
  std::vector<Point> out;
  out.reserve(grid.cell_count());
  for (std::size_t c : detail::cell_corners(grid)) {
    Point x = grid.point(c);
    for (int k = 0; k < grid.dim; ++k) x[k] += 0.5 * grid.h;
    out.push_back(x);
  }
  return out;
}

struct MinimizeReport {
  double energy = 0.0;  ///< regularized energy of the active cells at the last stage
  int iterations = 0;
  double residual = 0.0;
  /// Energy at the start of each stage and after every accepted step.
  std::vector<double> energy_history;
  /// Index into energy_history where each continuation stage begins.
  std::vector<std::size_t> stage_starts;
};

namespace detail {

template <int N>
MinimizeReport minimize(const Grid& grid, std::vector<double>& u, std::span<const NodeRole> mask, double p,
                        const SolverOptions& opts) {
  MinimizeReport rep;
  const std::size_t n = u.size();
  bool any_free = false;
  for (NodeRole r : mask) any_free = any_free || is_free(r);
  if (!any_free) return rep;

  const double eps0 = opts.eps_reg < 0.0 ? grid.h : opts.eps_reg;
  const int stages = eps0 > 0.0 ? opts.continuation_steps + 1 : 1;
  PEnergy<N> f(grid, mask, p, eps0);

  std::vector<double> g(n), d(n), r(n), z(n), q(n), hq(n), diag(n), trial(n), g_trial(n);

  // Scale for the relative residual: the gradient with every free node at 0.
  for (std::size_t i = 0; i < n; ++i) trial[i] = is_free(mask[i]) ? 0.0 : u[i];
  f.gradient(trial, g_trial);
  double ref = norm2(g_trial);
  if (!(ref > 0.0)) ref = 1.0;

  for (int stage = 0; stage < stages; ++stage) {
    const bool last = stage == stages - 1;
    f.set_eps(eps0 * std::pow(10.0, -stage));
    const double stage_tol = last ? opts.tol : std::max(opts.tol, 1e-6);
    rep.stage_starts.push_back(rep.energy_history.size());
    double energy = f.gradient(u, g);
    double gnorm = norm2(g);
    rep.energy_history.push_back(energy);
    while (true) {
      rep.residual = gnorm / ref;
      rep.energy = energy;
      if (rep.residual <= stage_tol) break;
      if (rep.iterations >= opts.max_iters) {
        throw NonConvergence("minimizer reached " + std::to_string(opts.max_iters) +
                                 " iterations at relative residual " + format_real(rep.residual),
                             u, rep.residual, rep.iterations);
      }
      ++rep.iterations;

      // Inexact Newton direction by Jacobi-preconditioned CG on H d = -g.
      f.prepare_hessian(u, diag);
      double eta = std::min(0.1, std::sqrt(rep.residual));
      eta = std::min(0.5, std::max(eta, 0.1 * stage_tol / rep.residual));
      std::fill(d.begin(), d.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        r[i] = -g[i];
        z[i] = r[i] / diag[i];
      }
      q = z;
      double rz = dot(r, z);
      const double bnorm = gnorm;
      for (int it = 0; it < opts.max_cg_iters; ++it) {
        f.hessian_times(u, q, hq);
        const double qhq = dot(q, hq);
        if (!(qhq > 0.0)) break;
        const double alpha = rz / qhq;
        for (std::size_t i = 0; i < n; ++i) {
          d[i] += alpha * q[i];
          r[i] -= alpha * hq[i];
        }
        if (norm2(r) <= eta * bnorm) break;
        for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) q[i] = z[i] + beta * q[i];
      }
      double slope = dot(g, d);
      if (!(slope < 0.0)) {
        for (std::size_t i = 0; i < n; ++i) d[i] = -g[i] / diag[i];
        slope = dot(g, d);
      }

      // Backtracking (Armijo).  Near the optimum the energy decrease drops
      // below rounding of the energy sum; a unit step is then accepted when
      // it reduces the gradient norm instead.
      double step = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 60 && !accepted; ++ls, step *= 0.5) {
        for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + step * d[i];
        const double e_trial = f.gradient(trial, g_trial);
        const double gn_trial = norm2(g_trial);
        const bool armijo = e_trial <= energy + 1e-4 * step * slope;
        const bool rounding = std::abs(e_trial - energy) <= 1e-13 * std::abs(energy) && gn_trial < gnorm;
        if (armijo || rounding) {
          accepted = true;
          u.swap(trial);
          g.swap(g_trial);
          energy = e_trial;
          gnorm = gn_trial;
        }
      }
      if (!accepted) {
        throw NonConvergence("line search stalled at relative residual " + format_real(rep.residual), u,
                             rep.residual, rep.iterations);
      }
      rep.energy_history.push_back(energy);
    }
  }
  return rep;
}

}  // namespace detail

/// Minimizes sum_cells h^N (eps^2 + s)^{p/2} over the free nodes of u, with
/// eps driven from opts.eps_reg (default h) down by factors of 10.  Fixed
/// nodes keep their values.  Throws NonConvergence with the best iterate.
inline MinimizeReport minimize_p_energy(const Grid& grid, std::vector<double>& u, std::span<const NodeRole> mask,
                                        double p, const SolverOptions& opts) {
  opts.validate();
  if (!(p > 1.0)) throw PreconditionError("exponent p must exceed 1");
  if (u.size() != grid.size() || mask.size() != grid.size())
    throw PreconditionError("grid function size does not match the grid");
  return grid.dim == 2 ? detail::minimize<2>(grid, u, mask, p, opts) : detail::minimize<3>(grid, u, mask, p, opts);
}

}  // namespace wienergauge
