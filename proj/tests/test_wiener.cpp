#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wienergauge/wiener.hpp"

using namespace wienergauge;

namespace {

DeltaProfile dyadic(int levels, const std::function<double(double)>& delta) {
  DeltaProfile prof;
  for (int k = 1; k <= levels; ++k) {
    const double t = std::ldexp(1.0, -k);
    prof.entries.push_back({t, delta(t)});
  }
  return prof;
}

std::vector<double> dyadic_radii(int from, int to) {
  std::vector<double> r;
  for (int k = from; k <= to; ++k) r.push_back(std::ldexp(1.0, -k));
  return r;
}

}  // namespace

TEST(WienerIntegral, ExactOnConstants) {
  const DeltaProfile prof = dyadic(10, [](double) { return 0.7; });
  EXPECT_NEAR(wiener_integral(prof, 0.5, std::ldexp(1.0, -10)), 0.49 * 10.0 * std::numbers::ln2, 1e-12);
  EXPECT_NEAR(wiener_integral(prof, 1.0, 0.25), 0.7 * std::log(4.0), 1e-12);
  EXPECT_EQ(wiener_integral(prof, 1.0, 1.0), 0.0);
}

TEST(WienerIntegral, ExactOnLinearInLogRadius) {
  // delta(t) = ln(1/t): int_rho^1 ln(1/t) dt/t = ln(1/rho)^2 / 2.
  const DeltaProfile prof = dyadic(8, [](double t) { return std::log(1.0 / t); });
  const double rho = std::ldexp(1.0, -8);
  EXPECT_NEAR(wiener_integral(prof, 1.0, rho), 0.5 * std::pow(std::log(1.0 / rho), 2), 1e-12);
}

TEST(WienerIntegral, MonotoneInRho) {
  const DeltaProfile prof = dyadic(6, [](double t) { return 1.0 + t; });
  double prev = 0.0;
  for (double r : dyadic_radii(1, 6)) {
    const double v = wiener_integral(prof, 0.5, r);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(WienerIntegral, Guards) {
  const DeltaProfile prof = dyadic(4, [](double) { return 0.5; });
  EXPECT_THROW(wiener_integral(prof, 0.5, 0.01), PreconditionError);
  QuadratureOptions q;
  q.extrapolate_below = true;
  EXPECT_NEAR(wiener_integral(prof, 1.0, 1.0 / 32, q), 0.5 * std::log(32.0), 1e-12);
  EXPECT_THROW(wiener_integral(prof, 0.0, 0.25), PreconditionError);
  EXPECT_THROW(wiener_integral(prof, 0.5, 1.5), PreconditionError);
}

TEST(ZiemerIntegral, ZeroProfileGivesZero) {
  const DeltaProfile prof = dyadic(5, [](double) { return 0.0; });
  EXPECT_EQ(ziemer_integral(prof, 2.0, 1.0 / 32), 0.0);
  EXPECT_EQ(wiener_integral(prof, 0.5, 1.0 / 32), 0.0);
}

TEST(ZiemerIntegral, ConstantProfile) {
  const DeltaProfile prof = dyadic(5, [](double) { return 2.0; });
  EXPECT_NEAR(ziemer_integral(prof, 2.0, 1.0 / 32), std::exp(-0.5) * std::log(32.0), 1e-12);
}

TEST(Growth, ClassifiesSyntheticSeries) {
  const auto rhos = dyadic_radii(2, 12);
  std::vector<double> lg, llg, bd;
  for (double r : rhos) {
    lg.push_back(1.0 + 2.0 * std::log(1.0 / r));
    llg.push_back(0.5 + std::log(std::log(1.0 / r)));
    bd.push_back(3.0 - r);
  }
  EXPECT_EQ(classify_series(rhos, lg).growth, GrowthClass::log);
  EXPECT_EQ(classify_series(rhos, llg).growth, GrowthClass::loglog);
  EXPECT_EQ(classify_series(rhos, bd).growth, GrowthClass::bounded);
  EXPECT_LT(classify_series(rhos, lg).residual, 1e-12);
}

TEST(Growth, DecreasingSeriesIsIndeterminate) {
  const auto rhos = dyadic_radii(2, 8);
  std::vector<double> v;
  for (double r : rhos) v.push_back(10.0 - std::log(1.0 / r));
  EXPECT_EQ(classify_series(rhos, v).growth, GrowthClass::indeterminate);
}

TEST(Growth, Guards) {
  EXPECT_THROW(classify_series({0.5, 0.25, 0.125}, {1, 2, 3}), PreconditionError);
  EXPECT_THROW(classify_series({0.5, 0.45, 0.4, 0.35}, {1, 2, 3, 4}), PreconditionError);
  EXPECT_THROW(classify_series({0.5, 0.6, 0.1, 0.05}, {1, 2, 3, 4}), PreconditionError);
}

TEST(WienerReport, CsvAndJson) {
  const DeltaProfile prof = dyadic(6, [](double) { return 0.5; });
  prof.validate();
  const WienerReport rep = wiener_report(prof, 1.0, dyadic_radii(1, 6));
  EXPECT_EQ(rep.growth, GrowthClass::log);
  std::ostringstream os;
  write_csv(os, rep);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "epsilon,rho,I,ziemer,growth_class,fit_residual");
  const auto j = to_json(rep);
  EXPECT_EQ(j["growth_class"], "log");
  EXPECT_DOUBLE_EQ(j["I"].get<double>(), rep.wiener);
}
