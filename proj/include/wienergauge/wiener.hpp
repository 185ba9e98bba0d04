#pragma once

// Wiener-type integrals of a sampled relative-capacity profile and a
// numerical diagnosis of their growth as the lower limit shrinks.
//
// Integrals over dt/t are evaluated in s = ln t: the transformed integrand
// is interpolated linearly between profile nodes and integrated exactly
// (trapezoid on the nodes).  Above the largest sampled t the integrand is
// extended linearly in s from the two top nodes up to t = 1; below the
// smallest t nothing is assumed unless constant extension is enabled.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wienergauge/errors.hpp"
#include "wienergauge/format.hpp"
#include "wienergauge/profile.hpp"

namespace wienergauge {

struct QuadratureOptions {
  /// Extend the integrand as a constant below the smallest sampled radius.
  bool extrapolate_below = false;
};

/// int_rho^1 F(delta(t)) dt / t for a pointwise transform F of the profile.
inline double log_integral(const DeltaProfile& prof, const std::function<double(double)>& transform, double rho,
                           const QuadratureOptions& qopts = {}) {
  prof.validate();
  if (!(rho > 0.0 && rho <= 1.0)) throw PreconditionError("lower limit rho must lie in (0,1]");
  if (prof.entries.size() < 2) throw PreconditionError("profile needs at least two entries");
  if (rho == 1.0) return 0.0;
  const double t_min = prof.entries.back().t;
  if (rho < t_min * (1.0 - 1e-12) && !qopts.extrapolate_below) {
    throw PreconditionError("lower limit " + format_real(rho) + " is below the profile's smallest radius " +
                            format_real(t_min));
  }

  // Nodes in ascending s, including the s = 0 endpoint.
  std::vector<double> s;
  std::vector<double> f;
  const std::size_t n = prof.entries.size();
  s.reserve(n + 1);
  f.reserve(n + 1);
  for (std::size_t i = n; i-- > 0;) {
    s.push_back(std::log(prof.entries[i].t));
    f.push_back(transform(prof.entries[i].delta));
  }
  {
    const double s1 = s[n - 1];
    const double s2 = s[n - 2];
    const double slope = (f[n - 1] - f[n - 2]) / (s1 - s2);
    s.push_back(0.0);
    f.push_back(std::max(0.0, f[n - 1] + slope * (0.0 - s1)));
  }

  const double lo = std::log(rho);
  double total = 0.0;
  if (lo < s.front()) {
    total += f.front() * (s.front() - lo);
  }
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    double a = s[i];
    const double b = s[i + 1];
    if (b <= lo) continue;
    double fa = f[i];
    if (a < lo) {
      fa = f[i] + (f[i + 1] - f[i]) * (lo - a) / (b - a);
      a = lo;
    }
    total += 0.5 * (fa + f[i + 1]) * (b - a);
  }
  return total;
}

/// int_rho^1 delta(t)^{1/eps} dt / t.
inline double wiener_integral(const DeltaProfile& prof, double eps, double rho, const QuadratureOptions& qopts = {}) {
  if (!(eps > 0.0 && eps <= 1.0)) throw PreconditionError("exponent eps must lie in (0,1]");
  const double floor = prof.noise_floor;
  const double power = 1.0 / eps;
  auto f = [floor, power](double d) { return d <= floor ? 0.0 : std::pow(d, power); };
  return log_integral(prof, f, rho, qopts);
}

/// int_rho^1 exp(-delta(t)^{-1/(p-1)}) dt / t, with the integrand 0 where delta is 0.
inline double ziemer_integral(const DeltaProfile& prof, double p, double rho, const QuadratureOptions& qopts = {}) {
  if (!(p > 1.0)) throw PreconditionError("exponent p must exceed 1");
  const double floor = prof.noise_floor;
  const double power = -1.0 / (p - 1.0);
  auto f = [floor, power](double d) { return d <= floor ? 0.0 : std::exp(-std::pow(d, power)); };
  return log_integral(prof, f, rho, qopts);
}

enum class GrowthClass { bounded, log, loglog, indeterminate };

inline std::string to_string(GrowthClass g) {
  switch (g) {
    case GrowthClass::bounded: return "bounded";
    case GrowthClass::log: return "log";
    case GrowthClass::loglog: return "loglog";
    case GrowthClass::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

struct GrowthFit {
  GrowthClass growth = GrowthClass::indeterminate;
  double residual = 0.0;  ///< relative residual of the chosen fit
  double slope = 0.0;     ///< coefficient of the growth term (0 for bounded)
};

/// Relative variation below which a sampled integral counts as saturated.
inline constexpr double kBoundedVariation = 0.05;
/// Relative fit residual a growth class must reach.
inline constexpr double kFitAcceptance = 0.2;

/// Classifies how values I(rho_k) grow as rho decreases.
///
/// bounded: I varies by less than 5% over the last decade of rho (the
///          samples with rho <= 10 rho_min); residual is that variation.
/// log / loglog: least-squares fit I ~ a + b L with L = ln(1/rho) or
///          ln ln(1/rho) and b > 0; residual is sqrt(SSR / SST).  The
///          smaller residual wins; indeterminate if neither is below 0.2.
inline GrowthFit classify_series(const std::vector<double>& rhos, const std::vector<double>& values) {
  if (rhos.size() != values.size()) throw PreconditionError("radii and values differ in length");
  if (rhos.size() < 4) throw PreconditionError("growth classification needs at least 4 radii");
  for (std::size_t i = 1; i < rhos.size(); ++i)
    if (!(rhos[i] < rhos[i - 1])) throw PreconditionError("growth radii must be strictly decreasing");
  if (!(rhos.front() / rhos.back() >= 4.0 * (1.0 - 1e-12)))
    throw PreconditionError("growth radii must span at least two dyadic steps");
  for (double r : rhos)
    if (!(r > 0.0 && r < 1.0)) throw PreconditionError("growth radii must lie in (0,1)");

  const double last = values.back();
  const double rho_min = rhos.back();
  double top = last;
  for (std::size_t i = 0; i < rhos.size(); ++i)
    if (rhos[i] <= 10.0 * rho_min * (1.0 + 1e-12)) {
      top = values[i];
      break;
    }
  if (!(std::abs(last) > 0.0)) return {GrowthClass::bounded, 0.0, 0.0};
  const double variation = std::abs(last - top) / std::abs(last);
  if (variation < kBoundedVariation) return {GrowthClass::bounded, variation, 0.0};

  auto fit = [&](auto basis) {
    const std::size_t n = rhos.size();
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += basis(rhos[i]);
      my += values[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = basis(rhos[i]) - mx;
      const double dy = values[i] - my;
      sxx += dx * dx;
      sxy += dx * dy;
      syy += dy * dy;
    }
    const double b = sxy / sxx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = values[i] - (my + b * (basis(rhos[i]) - mx));
      ssr += e * e;
    }
    const double rel = syy > 0.0 ? std::sqrt(ssr / syy) : 0.0;
    return std::pair{b, rel};
  };
  const auto [b_log, r_log] = fit([](double r) { return std::log(1.0 / r); });
  const auto [b_ll, r_ll] = fit([](double r) { return std::log(std::log(1.0 / r)); });

  GrowthFit best{GrowthClass::indeterminate, std::numeric_limits<double>::infinity(), 0.0};
  if (b_log > 0.0) best = {GrowthClass::log, r_log, b_log};
  if (b_ll > 0.0 && r_ll < best.residual) best = {GrowthClass::loglog, r_ll, b_ll};
  if (!(best.residual < kFitAcceptance)) {
    best.growth = GrowthClass::indeterminate;
    best.residual = std::min(r_log, r_ll);
  }
  return best;
}

/// Growth of the Wiener integral over the given decreasing lower limits.
inline GrowthFit classify_growth(const DeltaProfile& prof, double eps, const std::vector<double>& rhos,
                                 const QuadratureOptions& qopts = {}) {
  std::vector<double> values;
  values.reserve(rhos.size());
  for (double r : rhos) values.push_back(wiener_integral(prof, eps, r, qopts));
  return classify_series(rhos, values);
}

struct WienerReport {
  double eps = 1.0;
  double rho = 0.0;
  double wiener = 0.0;
  double ziemer = 0.0;
  GrowthClass growth = GrowthClass::indeterminate;
  double fit_residual = 0.0;
};

/// Integrals at the smallest rho plus the growth class of the Wiener integral.
inline WienerReport wiener_report(const DeltaProfile& prof, double eps, const std::vector<double>& rhos,
                                  const QuadratureOptions& qopts = {}) {
  if (rhos.empty()) throw PreconditionError("no lower limits given");
  WienerReport rep;
  rep.eps = eps;
  rep.rho = rhos.back();
  rep.wiener = wiener_integral(prof, eps, rep.rho, qopts);
  rep.ziemer = ziemer_integral(prof, prof.p, rep.rho, qopts);
  const GrowthFit fit = classify_growth(prof, eps, rhos, qopts);
  rep.growth = fit.growth;
  rep.fit_residual = fit.residual;
  return rep;
}

/// CSV row epsilon,rho,I,ziemer,growth_class,fit_residual.
inline void write_csv(std::ostream& os, const WienerReport& r, bool header = true) {
  if (header) os << "epsilon,rho,I,ziemer,growth_class,fit_residual\n";
  os << format_real(r.eps) << ',' << format_real(r.rho) << ',' << format_real(r.wiener) << ','
     << format_real(r.ziemer) << ',' << to_string(r.growth) << ',' << format_real(r.fit_residual) << '\n';
}

inline nlohmann::ordered_json to_json(const WienerReport& r) {
  nlohmann::ordered_json j;
  j["epsilon"] = r.eps;
  j["rho"] = r.rho;
  j["I"] = r.wiener;
  j["ziemer"] = r.ziemer;
  j["growth_class"] = to_string(r.growth);
  j["fit_residual"] = r.fit_residual;
  return j;
}

}  // namespace wienergauge
