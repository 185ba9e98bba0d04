#include <gtest/gtest.h>

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wienergauge/calibration.hpp"

using namespace wienergauge;

TEST(Sigma, MatchesIndependentRootFinder) {
  for (double gamma_0 : {0.5, 1.0, 4.0}) {
    for (double p : {1.5, 2.0, 3.0}) {
      auto f = [&](double s) { return absorption_condition(gamma_0, p, s) - 0.5; };
      auto tol = boost::math::tools::eps_tolerance<double>(50);
      const auto [lo, hi] = boost::math::tools::bisect(f, 1e-12, 1.0 - 1e-12, tol);
      const SigmaCalibration c = calibrate_sigma(gamma_0, p);
      EXPECT_NEAR(c.sigma, 0.5 * (lo + hi), 1e-12) << gamma_0 << ' ' << p;
      EXPECT_LT(c.residual, 1e-10);
      EXPECT_NEAR(c.p_0 + c.eps_cap, p, 1e-14);
    }
  }
}

TEST(Sigma, UnitGammaQuadratic) {
  // gamma_0 = 1, p = 2: sigma (1 + sigma - sigma^2) = (1 - sigma) / 2, root 1 - 1/sqrt(2).
  const SigmaCalibration c = calibrate_sigma(1.0, 2.0);
  EXPECT_NEAR(c.sigma, 1.0 - std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(c.eps_cap, 0.1716, 1e-4);
}

TEST(Sigma, SigmaShrinksAsGammaGrows) {
  EXPECT_GT(calibrate_sigma(0.5, 2.0).sigma, calibrate_sigma(5.0, 2.0).sigma);
}

TEST(Calibrate, FailsWhenPZeroNotAboveOne) {
  EXPECT_THROW(calibrate(0.05, 2.0), CalibrationFailure);
  EXPECT_NO_THROW(calibrate(1.0, 2.0));
  EXPECT_THROW(calibrate(1.0, 1.0), PreconditionError);
}

TEST(Calibrate, DefaultsAndTextBlock) {
  const Calibration c = calibrate(1.0, 2.0, 3.0, 0.5);
  EXPECT_DOUBLE_EQ(c.gamma, 3.0);
  EXPECT_DOUBLE_EQ(c.eps_eff, std::min(0.5, c.eps_cap));
  std::ostringstream os;
  write_text(os, c);
  EXPECT_NE(os.str().find("sigma="), std::string::npos);
  EXPECT_NE(os.str().find("eps_eff="), std::string::npos);
  EXPECT_DOUBLE_EQ(effective_epsilon(0.3, 0.2), 0.2);
  EXPECT_THROW(effective_epsilon(1.2, 0.2), PreconditionError);
}

TEST(Recursion, MatchesGeometricClosedForm) {
  const double d = 0.6, gamma = 3.0, eps = 0.25;
  const ModulusSequence s = oscillation_recursion(std::vector<double>(65, d), gamma, eps, 2.0, 0.0);
  const double f = 1.0 - std::pow(d, 4.0) / 12.0;
  for (const auto& e : s.entries) {
    EXPECT_NEAR(e.osc, 2.0 * std::pow(f, e.n), 1e-12);
    EXPECT_LE(e.osc, 2.0 * std::exp(-e.n * std::pow(d, 4.0) / 12.0));
    EXPECT_NEAR(e.closed_form, gamma * 2.0 * std::exp(-e.n * std::numbers::ln2 * std::pow(d, 4.0)), 1e-12);
  }
  EXPECT_DOUBLE_EQ(s.entries[3].rho, 0.125);
}

TEST(Recursion, FloorsAtTwiceDatumOscillation) {
  const ModulusSequence s = oscillation_recursion(std::vector<double>(40, 1.0), 2.0, 1.0, 1.0, 0.1);
  EXPECT_NEAR(s.entries.back().osc, 0.2, 1e-15);
}

TEST(Recursion, ZeroDeltaGivesNoDecay) {
  const ModulusSequence s = oscillation_recursion(std::vector<double>(5, 0.0), 2.0, 0.5, 1.0, 0.0);
  for (const auto& e : s.entries) EXPECT_EQ(e.osc, 1.0);
}

TEST(Recursion, GuardsAndCsv) {
  EXPECT_THROW(oscillation_recursion({0.5}, 1.0, 0.5, 1.0, 0.0), PreconditionError);
  EXPECT_THROW(oscillation_recursion({-0.5}, 2.0, 0.5, 1.0, 0.0), PreconditionError);
  std::ostringstream os;
  write_csv(os, oscillation_recursion({0.5, 0.5}, 2.0, 0.5, 1.0, 0.0));
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "n,rho,delta,factor,osc_bound,eq18_bound");
}

TEST(OscillationBound, MaxOfTwoTerms) {
  EXPECT_DOUBLE_EQ(oscillation_bound(0.1, 1.0, 2.0, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(oscillation_bound(0.5, 1.0, 2.0, 10.0), 1.0);
  EXPECT_THROW(oscillation_bound(-0.1, 1.0, 2.0, 0.0), PreconditionError);
}
