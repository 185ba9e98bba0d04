// Acceptance suite: one PASS/FAIL line per criterion, plus indented detail
// lines.  Exit status is the number of failed criteria.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "wienergauge/calibration.hpp"
#include "wienergauge/capacity.hpp"
#include "wienergauge/estimates.hpp"
#include "wienergauge/solver.hpp"
#include "wienergauge/wiener.hpp"

using namespace wienergauge;

namespace {

int failures = 0;

void verdict(int id, bool ok, const std::string& summary) {
  std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", summary.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void info(const std::string& s) {
  std::printf("    %s\n", s.c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.6g", v);
  return b;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const Point kOrigin{0.0, 0.0, 0.0};

CapacityResult ball_condenser(int dim, double p, double a, double b, int coarsest_nodes, int levels) {
  const Grid g = make_grid(dim, kOrigin, b, 2.0 * b / (coarsest_nodes - 1));
  SolverOptions opts;
  opts.levels = levels;
  auto raster = [dim, a](const Grid& gr) {
    NodeSet k;
    for (std::size_t i = 0; i < gr.size(); ++i)
      if (distance(gr.point(i), kOrigin, dim) <= a * (1.0 + 1e-12)) k.push_back(i);
    return k;
  };
  return estimate_capacity(raster, p, g, opts, b, kOrigin);
}

void radial(int id, int dim, double p, int coarsest, int levels, double tol_rel, double time_limit) {
  const auto t0 = std::chrono::steady_clock::now();
  const CapacityResult r = ball_condenser(dim, p, 0.25, 1.0, coarsest, levels);
  const double secs = seconds_since(t0);
  const double exact = radial_condenser_capacity(p, dim, 0.25, 1.0);
  const double err = std::abs(r.extrapolated - exact) / exact;
  for (auto [h, v] : r.per_level) info("h=" + fmt(h) + " capacity=" + fmt(v));
  verdict(id, err < tol_rel && secs < time_limit,
          "extrapolated=" + fmt(r.extrapolated) + " exact=" + fmt(exact) + " rel_err=" + fmt(err) +
              " order=" + fmt(r.order_estimate) + " time=" + fmt(secs) + "s");
}

void criterion4() {
  const DomainSpec d = gallery("half_space");
  const BoundaryPoint y{kOrigin, 2};
  const DeltaProfile prof = delta_profile(d, y, 2.0, {0.25, 0.125, 0.0625}, GridPolicy{}, SolverOptions{});
  double mean = 0.0;
  for (const auto& e : prof.entries) mean += e.delta / 3.0;
  double spread = 0.0;
  for (const auto& e : prof.entries) {
    spread = std::max(spread, std::abs(e.delta - mean) / mean);
    info("rho=" + fmt(e.t) + " delta=" + fmt(e.delta));
  }
  verdict(4, spread < 0.1, "max relative deviation from mean=" + fmt(spread));
}

void criterion5() {
  DeltaProfile prof;
  for (int k = 1; k <= 10; ++k) prof.entries.push_back({std::ldexp(1.0, -k), 0.7});
  const double rho = std::ldexp(1.0, -10);
  const double got = wiener_integral(prof, 0.5, rho);
  const double want = 0.49 * 10.0 * std::numbers::ln2;
  verdict(5, std::abs(got - want) < 1e-10, "I=" + fmt(got) + " abs_err=" + fmt(std::abs(got - want)));
}

void criterion6() {
  const SigmaCalibration c = calibrate_sigma(1.0, 2.0);
  const bool ok = c.residual < 1e-10 && c.eps_cap > 0.15 && c.eps_cap < 0.20 && std::abs(c.eps_cap - 0.172) < 1e-3;
  verdict(6, ok, "sigma=" + fmt(c.sigma) + " eps_cap=" + fmt(c.eps_cap) + " residual=" + fmt(c.residual));
}

void criterion7() {
  const double d0 = 0.8, gamma = 2.0, eps = 0.5, osc0 = 1.0;
  const std::vector<double> deltas(65, d0);
  const ModulusSequence seq = oscillation_recursion(deltas, gamma, eps, osc0, 0.0);
  const double f = 1.0 - std::pow(d0, 1.0 / eps) / (4.0 * gamma);
  double worst = 0.0;
  bool below = true;
  for (const auto& e : seq.entries) {
    worst = std::max(worst, std::abs(e.osc - osc0 * std::pow(f, e.n)));
    below = below && e.osc <= osc0 * std::exp(-e.n * std::pow(d0, 1.0 / eps) / (4.0 * gamma));
  }
  verdict(7, worst <= 1e-12 && below, "max deviation=" + fmt(worst) + " exponential envelope " + (below ? "holds" : "violated"));
}

/// Direct solve of the 5/7-point Laplacian with u = g off the free nodes.
std::vector<double> laplace_oracle(const Grid& g, const std::vector<NodeRole>& mask, const std::vector<double>& fixed) {
  std::vector<std::ptrdiff_t> id(g.size(), -1);
  std::ptrdiff_t n = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (is_free(mask[i])) id[i] = n++;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (id[i] < 0) continue;
    const Index idx = g.unravel(i);
    for (int k = 0; k < g.dim; ++k)
      for (int s = -1; s <= 1; s += 2) {
        Index j = idx;
        j[k] += s;
        const std::size_t jj = g.index(j);
        trip.emplace_back(id[i], id[i], 1.0);
        if (id[jj] >= 0)
          trip.emplace_back(id[i], id[jj], -1.0);
        else
          rhs[id[i]] += fixed[jj];
      }
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(a);
  const Eigen::VectorXd x = ldlt.solve(rhs);
  std::vector<double> u = fixed;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (id[i] >= 0) u[i] = x[id[i]];
  return u;
}

void criterion8() {
  bool ok = true;
  double worst = 0.0;
  const Datum datum = [](const Point& x) { return std::cos(2.0 * x[0]) + x[1] * x[1] - 0.5 * x[2]; };
  for (const auto& name : gallery_names()) {
    const DomainSpec d = gallery(name);
    const int n = d.dim == 2 ? 65 : 33;
    SolverOptions opts;
    opts.tol = 1e-12;
    DirichletProblem prob{d, datum, 2.0, make_grid(d.dim, kOrigin, 1.0, 2.0 / (n - 1)), opts};
    const SolveResult r = solve_p_laplace(prob);
    const auto ref = laplace_oracle(prob.grid, r.u.mask, r.u.values);
    double err = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) err = std::max(err, std::abs(ref[i] - r.u.values[i]));
    info(name + " grid=" + prob.grid.describe() + " max_err=" + fmt(err));
    worst = std::max(worst, err);
    ok = ok && err < 1e-6;
  }
  double affine_err = 0.0;
  for (int dim : {2, 3}) {
    for (double p : {1.5, 2.0, 3.0}) {
      if (p > dim) continue;
      const Datum aff = [](const Point& x) { return 0.3 + 1.1 * x[0] - 0.7 * x[1] + 0.2 * x[2]; };
      const int n = dim == 2 ? 65 : 33;
      DirichletProblem prob{unobstructed(dim), aff, p, make_grid(dim, kOrigin, 1.0, 2.0 / (n - 1)), SolverOptions{}};
      const SolveResult r = solve_p_laplace(prob);
      for (std::size_t i = 0; i < r.u.size(); ++i)
        affine_err = std::max(affine_err, std::abs(r.u.values[i] - aff(r.u.grid.point(i))));
    }
  }
  info("affine max_err=" + fmt(affine_err));
  verdict(8, ok && affine_err < 1e-10, "worst oracle max_err=" + fmt(worst) + " affine max_err=" + fmt(affine_err));
}

struct SuiteRun {
  std::vector<IneqReport> reports;
  SolveResult solve;
};

const Datum kSlitDatum = [](const Point& x) { return std::clamp(4.0 * std::hypot(x[0], x[1]) - 1.0, 0.0, 1.0); };

SuiteRun slit_suite(int n, const Calibration& cal) {
  DirichletProblem prob{gallery("slit"), kSlitDatum, 2.0, make_grid(2, kOrigin, 1.0, 2.0 / (n - 1)), {}};
  prob.opts.tol = 1e-10;
  SuiteRun run;
  run.solve = solve_p_laplace(prob);
  SuiteConfig cfg;
  cfg.domain = prob.domain;
  cfg.eps = cal.eps_eff;
  run.reports = inequality_suite(run.solve.u, kSlitDatum, cfg, cal.eps_cap, cal.p_0);
  return run;
}

void criterion9(const SuiteRun& coarse, const SuiteRun& fine) {
  bool finite = true;
  bool stable = true;
  for (std::size_t i = 0; i < fine.reports.size(); ++i) {
    const auto& a = coarse.reports[i];
    const auto& b = fine.reports[i];
    finite = finite && std::isfinite(a.ratio) && std::isfinite(b.ratio) && !b.degenerate();
    const double hi = std::max(a.ratio, b.ratio);
    const double lo = std::min(a.ratio, b.ratio);
    const bool pair_ok = lo > 0.0 ? hi / lo < 2.0 : hi == 0.0;
    stable = stable && pair_ok;
    info(b.name + " 129:" + fmt(a.ratio) + " 257:" + fmt(b.ratio) + " [" + b.witness + "]");
  }
  bool h_indep = true;
  double base = 0.0;
  double spread = 0.0;
  for (const auto& r : fine.reports)
    if (r.name == "eq21") base = r.ratio;
  for (const auto& r : fine.reports)
    if (r.name == "eq23") {
      h_indep = h_indep && r.ratio <= 1.1 * base;
      spread = std::max(spread, std::abs(r.ratio - base) / base);
    }
  info("largest shifted ratio stays within 1.1 x unshifted: " + std::string(h_indep ? "yes" : "no") +
       "; largest relative change=" + fmt(spread));
  verdict(9, finite && stable && h_indep,
          std::string("finite=") + (finite ? "yes" : "no") + " refinement<2x=" + (stable ? "yes" : "no") +
              " shift bound=" + (h_indep ? "yes" : "no"));
}

void criterion10(const SuiteRun& coarse, const SuiteRun& fine, const Calibration& cal) {
  const double eps = cal.eps_eff;
  const double gamma = std::max(suite_constant(coarse.reports, eps), suite_constant(fine.reports, eps));
  const DomainSpec d = gallery("slit");
  std::vector<double> radii;
  for (int k = 1; k <= 6; ++k) radii.push_back(std::ldexp(1.0, -k));
  const DeltaProfile prof = delta_profile(d, BoundaryPoint{kOrigin, 2}, 2.0, radii, GridPolicy{}, SolverOptions{});
  const GridFunction& u = fine.solve.u;
  const double osc_1 = measure_boundary_oscillation(u, d, kOrigin, {1.0})[0];
  const std::vector<bool> in_e = domain_mask(d, u.grid);
  const std::vector<bool> bdry = boundary_nodes(u.grid, in_e);
  info("gamma=" + fmt(gamma) + " eps=" + fmt(eps) + " osc_B1=" + fmt(osc_1));
  for (const auto& e : prof.entries) info("t=" + fmt(e.t) + " delta=" + fmt(e.delta));
  bool ok = true;
  std::vector<double> deltas;
  for (const auto& e : prof.entries) deltas.push_back(e.delta);
  for (int k = 2; k <= 6; ++k) {
    const double rho = std::ldexp(1.0, -k);
    double g_lo = HUGE_VAL, g_hi = -HUGE_VAL;
    for (std::size_t i = 0; i < u.size(); ++i)
      if (bdry[i] && distance(u.grid.point(i), kOrigin, 2) < rho) {
        g_lo = std::min(g_lo, kSlitDatum(u.grid.point(i)));
        g_hi = std::max(g_hi, kSlitDatum(u.grid.point(i)));
      }
    const double osc_g = g_hi >= g_lo ? g_hi - g_lo : 0.0;
    const double wi = wiener_integral(prof, eps, rho);
    const double bound = oscillation_bound(osc_g, osc_1, gamma, wi);
    const double osc = measure_boundary_oscillation(u, d, kOrigin, {rho})[0];
    ok = ok && bound >= osc;
    info("rho=" + fmt(rho) + " I=" + fmt(wi) + " bound=" + fmt(bound) + " measured_osc=" + fmt(osc) +
         (bound >= osc ? "" : "  <- violated"));
  }
  const ModulusSequence seq = oscillation_recursion(deltas, std::max(gamma, 1.0 + 1e-12), eps, osc_1, 0.0, 0.5);
  for (const auto& e : seq.entries) info("dyadic recursion rho=" + fmt(e.rho) + " osc_bound=" + fmt(e.osc));
  verdict(10, ok, "closed-form bound >= measured oscillation at every dyadic radius: " + std::string(ok ? "yes" : "no"));
}

void criterion11() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> radii;
  for (int k = 1; k <= 5; ++k) radii.push_back(std::ldexp(1.0, -k));
  GridPolicy gp;
  gp.max_nodes_per_axis = 33;
  bool ok = true;

  const DomainSpec cone = gallery("cone");
  const DeltaProfile pc = delta_profile(cone, BoundaryPoint{kOrigin, 3}, 2.0, radii, gp, SolverOptions{});
  for (const auto& e : pc.entries) info("cone t=" + fmt(e.t) + " delta=" + fmt(e.delta));
  std::vector<double> zi;
  for (double r : radii) zi.push_back(ziemer_integral(pc, 2.0, r));
  const GrowthFit wc = classify_growth(pc, 1.0, radii);
  const GrowthFit zc = classify_series(radii, zi);
  info("cone wiener(eps=1): " + to_string(wc.growth) + " residual=" + fmt(wc.residual));
  info("cone ziemer: " + to_string(zc.growth) + " residual=" + fmt(zc.residual));
  ok = ok && wc.growth == GrowthClass::log && wc.residual < 0.05 && zc.growth == GrowthClass::log && zc.residual < 0.05;

  const DomainSpec spine = gallery("spine");
  const DeltaProfile ps = delta_profile(spine, BoundaryPoint{kOrigin, 3}, 2.0, radii, gp, SolverOptions{});
  for (const auto& e : ps.entries) info("spine t=" + fmt(e.t) + " delta=" + fmt(e.delta));
  const GrowthFit s1 = classify_growth(ps, 1.0, radii);
  const GrowthFit s05 = classify_growth(ps, 0.5, radii);
  info("spine wiener(eps=1): " + to_string(s1.growth) + " residual=" + fmt(s1.residual));
  info("spine wiener(eps=0.5): " + to_string(s05.growth) + " residual=" + fmt(s05.residual));
  ok = ok && s1.growth == GrowthClass::loglog && s1.residual < 0.2 && s05.growth == GrowthClass::bounded;
  const double secs = seconds_since(t0);
  verdict(11, ok && secs < 1200.0,
          "cone " + to_string(wc.growth) + "/" + to_string(zc.growth) + ", spine eps=1 " + to_string(s1.growth) +
              ", eps=0.5 " + to_string(s05.growth) + " time=" + fmt(secs) + "s");
}

}  // namespace

int main() {
  radial(1, 2, 2.0, 65, 3, 0.02, 60.0);
  radial(2, 3, 2.0, 25, 3, 0.05, 300.0);
  radial(3, 2, 1.5, 65, 3, 0.03, 1e9);
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  const Calibration cal = calibrate(1.0, 2.0);
  const SuiteRun coarse = slit_suite(129, cal);
  const SuiteRun fine = slit_suite(257, cal);
  criterion9(coarse, fine);
  criterion10(coarse, fine, cal);
  criterion11();
  std::printf("%d criteria failed\n", failures);
  return failures;
}
