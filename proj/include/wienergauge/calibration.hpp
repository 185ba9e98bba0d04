#pragma once

// Constants of the boundary oscillation estimate and the dyadic decay
// recursion built from them.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "wienergauge/errors.hpp"
#include "wienergauge/format.hpp"

namespace wienergauge {

/// g(sigma) = gamma_0 sigma^{p-1} (1 + sigma - sigma^2) / (1 - sigma): the
/// absorption condition gamma_0 (sigma p + q) sigma^p / (q - (1 - sigma) p)
/// after substituting q = (1 - sigma^2) p.
inline double absorption_condition(double gamma_0, double p, double sigma) {
  return gamma_0 * std::pow(sigma, p - 1.0) * (1.0 + sigma - sigma * sigma) / (1.0 - sigma);
}

struct SigmaCalibration {
  double sigma = 0.0;
  double p_0 = 0.0;
  double eps_cap = 0.0;  ///< p - p_0 = sigma^2 p
  double residual = 0.0;
};

/// Root of absorption_condition(sigma) = 1/2 on (0,1) by bisection; g is
/// continuous and strictly increasing there with g(0+) = 0, g(1-) = inf.
inline SigmaCalibration calibrate_sigma(double gamma_0, double p) {
  if (!(gamma_0 > 0.0) || !std::isfinite(gamma_0)) throw PreconditionError("gamma_0 must be positive");
  if (!(p > 1.0)) throw PreconditionError("exponent p must exceed 1");
  double lo = 0.0;
  double hi = 1.0;
  double mid = 0.5;
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (absorption_condition(gamma_0, p, mid) < 0.5)
      lo = mid;
    else
      hi = mid;
  }
  SigmaCalibration c;
  c.sigma = mid;
  c.residual = std::abs(absorption_condition(gamma_0, p, mid) - 0.5);
  c.p_0 = (1.0 - mid * mid) * p;
  c.eps_cap = mid * mid * p;
  return c;
}

inline double effective_epsilon(double eps_harnack, double eps_cap) {
  if (!(eps_harnack > 0.0 && eps_harnack < 1.0) || !(eps_cap > 0.0 && eps_cap < 1.0))
    throw PreconditionError("both exponents must lie in (0,1)");
  return std::min(eps_harnack, eps_cap);
}

/// Default weak Harnack exponent when none is measured or supplied.
inline constexpr double kDefaultEpsHarnack = 0.5;

struct Calibration {
  double gamma_0 = 1.0;
  double gamma_1 = 1.0;
  double C_harnack = 2.0;
  double eps_harnack = kDefaultEpsHarnack;
  double sigma = 0.0;
  double p_0 = 0.0;
  double eps_cap = 0.0;
  double eps_eff = 0.0;
  double gamma = 2.0;
  double Q = 1.0;
  double ratio_C1_C0 = 1.0;
  double p = 2.0;
};

/// Threads the constants together.  gamma defaults to max(2, C_harnack)
/// when not given (gamma <= 0).  Throws CalibrationFailure when the
/// computed p_0 is not above 1.
inline Calibration calibrate(double gamma_0, double p, double C_harnack = 2.0,
                             double eps_harnack = kDefaultEpsHarnack, double gamma = 0.0, double gamma_1 = 1.0,
                             double Q = 1.0, double ratio_C1_C0 = 1.0) {
  if (!(Q >= 1.0)) throw PreconditionError("Q must be at least 1");
  if (!(ratio_C1_C0 >= 1.0)) throw PreconditionError("ellipticity ratio must be at least 1");
  if (!(C_harnack > 1.0)) throw PreconditionError("weak Harnack constant must exceed 1");
  if (!(gamma_1 > 0.0)) throw PreconditionError("gamma_1 must be positive");
  const SigmaCalibration s = calibrate_sigma(gamma_0, p);
  if (!(s.p_0 > 1.0)) {
    throw CalibrationFailure("sigma = " + format_real(s.sigma) + " gives p_0 = " + format_real(s.p_0) +
                             ", which is not above 1");
  }
  Calibration c;
  c.gamma_0 = gamma_0;
  c.gamma_1 = gamma_1;
  c.C_harnack = C_harnack;
  c.eps_harnack = eps_harnack;
  c.sigma = s.sigma;
  c.p_0 = s.p_0;
  c.eps_cap = s.eps_cap;
  c.eps_eff = s.eps_cap < 1.0 ? effective_epsilon(eps_harnack, s.eps_cap) : eps_harnack;
  c.gamma = gamma > 0.0 ? gamma : std::max(2.0, C_harnack);
  if (!(c.gamma > 1.0)) throw PreconditionError("gamma must exceed 1");
  c.Q = Q;
  c.ratio_C1_C0 = ratio_C1_C0;
  c.p = p;
  return c;
}

/// Flat key=value block.
inline void write_text(std::ostream& os, const Calibration& c) {
  os << "p=" << format_real(c.p) << '\n'
     << "gamma_0=" << format_real(c.gamma_0) << '\n'
     << "gamma_1=" << format_real(c.gamma_1) << '\n'
     << "C_harnack=" << format_real(c.C_harnack) << '\n'
     << "eps_harnack=" << format_real(c.eps_harnack) << '\n'
     << "sigma=" << format_real(c.sigma) << '\n'
     << "p_0=" << format_real(c.p_0) << '\n'
     << "eps_cap=" << format_real(c.eps_cap) << '\n'
     << "eps_eff=" << format_real(c.eps_eff) << '\n'
     << "gamma=" << format_real(c.gamma) << '\n'
     << "Q=" << format_real(c.Q) << '\n'
     << "ratio_C1_C0=" << format_real(c.ratio_C1_C0) << '\n';
}

/// gamma * max(osc_g, osc_u * exp(-I)).
inline double oscillation_bound(double osc_g, double osc_u, double gamma, double wiener) {
  if (!(osc_g >= 0.0 && osc_u >= 0.0 && wiener >= 0.0)) throw PreconditionError("bound inputs must be non-negative");
  if (!(gamma >= 1.0)) throw PreconditionError("gamma must be at least 1");
  return gamma * std::max(osc_g, osc_u * std::exp(-wiener));
}

struct ModulusSequence {
  struct Entry {
    int n = 0;
    double rho = 0.0;
    double delta = 0.0;
    double factor = 1.0;
    double osc = 0.0;
    double closed_form = 0.0;  ///< gamma max(osc_g, osc_0 exp(-I_n))
    /// Same recursion with delta in place of delta^{1/eps} in the factor.
    double osc_linear = 0.0;
  };
  double rho_0 = 0.0;
  double osc_g = 0.0;
  std::vector<Entry> entries;
};

inline double decay_factor(double delta, double gamma, double eps) {
  return 1.0 - std::clamp(std::pow(delta, 1.0 / eps) / (4.0 * gamma), 0.0, 1.0);
}

/// Oscillation bounds over the balls of radius rho_0 2^{-n}:
///   osc_{n+1} = max(2 osc_g, factor_n osc_n),
///   factor_n  = 1 - clamp(delta_n^{1/eps} / (4 gamma), 0, 1).
/// The closed form uses I_n = ln 2 sum_{j<n} delta_j^{1/eps}.
inline ModulusSequence oscillation_recursion(const std::vector<double>& deltas, double gamma, double eps, double osc_0,
                                             double osc_g, double rho_0 = 1.0) {
  if (!(gamma > 1.0)) throw PreconditionError("gamma must exceed 1");
  if (!(eps > 0.0 && eps <= 1.0)) throw PreconditionError("exponent eps must lie in (0,1]");
  if (!(osc_0 >= 0.0 && osc_g >= 0.0)) throw PreconditionError("oscillations must be non-negative");
  for (double d : deltas)
    if (!(d >= 0.0)) throw PreconditionError("relative capacities must be non-negative");
  ModulusSequence seq;
  seq.rho_0 = rho_0;
  seq.osc_g = osc_g;
  double osc = osc_0;
  double osc_lin = osc_0;
  double integral = 0.0;
  for (std::size_t n = 0; n < deltas.size(); ++n) {
    ModulusSequence::Entry e;
    e.n = static_cast<int>(n);
    e.rho = std::ldexp(rho_0, -static_cast<int>(n));
    e.delta = deltas[n];
    e.factor = decay_factor(deltas[n], gamma, eps);
    e.osc = osc;
    e.osc_linear = osc_lin;
    e.closed_form = gamma * std::max(osc_g, osc_0 * std::exp(-integral));
    seq.entries.push_back(e);
    osc = std::max(2.0 * osc_g, e.factor * osc);
    osc_lin = std::max(2.0 * osc_g, (1.0 - std::clamp(deltas[n] / (4.0 * gamma), 0.0, 1.0)) * osc_lin);
    integral += std::numbers::ln2 * std::pow(deltas[n], 1.0 / eps);
  }
  return seq;
}

/// CSV n,rho,delta,factor,osc_bound,eq18_bound.
inline void write_csv(std::ostream& os, const ModulusSequence& seq) {
  os << "n,rho,delta,factor,osc_bound,eq18_bound\n";
  for (const auto& e : seq.entries) {
    os << e.n << ',' << format_real(e.rho) << ',' << format_real(e.delta) << ',' << format_real(e.factor) << ','
       << format_real(e.osc) << ',' << format_real(e.closed_form) << '\n';
  }
}

}  // namespace wienergauge
