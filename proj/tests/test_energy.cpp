#include "fblab/blowup.hpp"
#include "fblab/energy.hpp"
#include "fblab/smoothing.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace fblab;

namespace {

const Point origin{0.0, 0.0};

GridSpec square(double half, int n) { return grid_2d({-half, half}, {-half, half}, n, n); }

ScalarField half_space(const GridSpec& g)
{
  return ScalarField::sample(g, [](const Point& x) { return 0.5 * std::pow(std::max(x[1], 0.0), 2); });
}

ScalarField x1_squared(const GridSpec& g)
{
  return ScalarField::sample(g, [](const Point& x) { return 0.5 * x[0] * x[0]; });
}

QuadraticForm form(double a11, double a12, double a22)
{
  QuadraticForm q;
  q.m = {{{a11, a12}, {a12, a22}}};
  return q;
}

} // namespace

TEST(EnergyJ, ZeroFields)
{
  GridSpec g = square(1.0, 17);
  EXPECT_EQ(energy_J(ScalarField(g), ScalarField(g), 3.0), 0.0);
}

TEST(EnergyJ, ClassicalPairClosedForm)
{
  // per component: int u'^2/2 = 1/24 and int u = 1/24
  GridSpec g = grid_1d(-1, 1, 1025);
  ScalarField u = ScalarField::sample(g, [](const Point& x) {
    return 0.5 * std::pow(std::max(std::abs(x[0]) - 0.5, 0.0), 2);
  });
  EXPECT_NEAR(energy_J(u, u, 0.0), 1.0 / 6.0, 1e-4);
}

TEST(EnergyJ, HomogeneityOfEachTerm)
{
  GridSpec g = square(1.0, 33);
  ScalarField u = ScalarField::sample(g, [](const Point& x) { return 1.0 + x[0] * x[0] + 0.3 * x[1]; });
  ScalarField zero(g);
  double j1 = energy_J(u, zero, 0.0);
  ScalarField u2 = u, u3 = u;
  for (std::size_t k = 0; k < g.size(); ++k) {
    u2[k] *= 2.0;
    u3[k] *= 3.0;
  }
  double j2 = energy_J(u2, zero, 0.0), j3 = energy_J(u3, zero, 0.0);
  // J(a u) = a^2 D + a L: solve from a = 1, 2 and predict a = 3
  double d = (j2 - 2.0 * j1) / 2.0, l = j1 - d;
  EXPECT_NEAR(j3, 9.0 * d + 3.0 * l, 1e-12 * std::abs(j3));
}

TEST(EnergyJeps, AgreesWithJAboveEpsilon)
{
  GridSpec g = square(1.0, 17);
  const double eps = 1e-2;
  ScalarField u = ScalarField::sample(g, [](const Point& x) { return 0.02 + x[0] * x[0]; });
  ScalarField v = ScalarField::sample(g, [](const Point& x) { return 0.05 + 0.1 * x[1] * x[1]; });
  EXPECT_NEAR(energy_Jeps(u, v, 0.7, eps), energy_J(u, v, 0.7), 1e-12);
}

TEST(EnergyJeps, BelowMinusEpsilonOnlyDirichlet)
{
  GridSpec g = square(1.0, 17);
  ScalarField u = ScalarField::sample(g, [](const Point& x) { return -1.0 - x[0] * x[0]; });
  ScalarField v = ScalarField::sample(g, [](const Point& x) { return -0.5 - 0.2 * x[1]; });
  double expected = detail::dirichlet_energy(u) + detail::dirichlet_energy(v);
  EXPECT_NEAR(energy_Jeps(u, v, 0.3, 0.1), expected, 1e-13 * expected);
}

TEST(EnergyJeps, ZeroFieldsGivePrimitiveAtZero)
{
  GridSpec g = square(1.0, 17);
  const double eps = 0.1, lambda = 0.4, p0 = smooth_primitive(0.0, eps);
  EXPECT_NEAR(p0, 3.0 * eps / 16.0, 1e-15);
  double val = energy_Jeps(ScalarField(g), ScalarField(g), lambda, eps);
  EXPECT_NEAR(val, g.box_volume() * (2.0 * p0 + lambda * p0 * p0), 1e-12);
}

TEST(Weiss, HalfSpaceAndPolynomialValues)
{
  GridSpec g = square(1.0, 257);
  ScalarField zero(g);
  for (double r : {0.25, 0.5}) {
    EXPECT_NEAR(weiss(half_space(g), zero, 0.0, origin, r), M_PI / 32.0, 5e-3 * M_PI / 32.0);
    EXPECT_NEAR(weiss(x1_squared(g), zero, 0.0, origin, r), M_PI / 16.0, 5e-3 * M_PI / 16.0);
  }
  EXPECT_EQ(weiss(zero, zero, 0.0, origin, 0.5), 0.0);
}

TEST(Weiss, OneDimensionalHalfLineValue)
{
  // alpha_1 = 2/3, so the half-line energy is alpha_1 / 8 = 1/12
  GridSpec g = grid_1d(-1, 1, 1025);
  ScalarField u = ScalarField::sample(g, [](const Point& x) { return 0.5 * std::pow(std::max(x[0], 0.0), 2); });
  EXPECT_NEAR(weiss(u, ScalarField(g), 0.0, origin, 0.5), 1.0 / 12.0, 1e-3);
}

TEST(Weiss, BallOutsideBoxIsGeometryError)
{
  GridSpec g = square(1.0, 33);
  try {
    weiss(ScalarField(g), ScalarField(g), 0.0, {0.5, 0.0}, 0.6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::geometry);
  }
}

TEST(Weiss, HomogeneousFieldIsRadiusIndependent)
{
  // the quadrature error scales with h / r, so the grid must resolve the smallest radius
  GridSpec g = square(1.0, 513);
  ScalarField u = ScalarField::sample(g, [](const Point& x) {
    double t = std::atan2(x[1], x[0]);
    return (x[0] * x[0] + x[1] * x[1]) * (1.0 + 0.3 * std::cos(3.0 * t));
  });
  ScalarField zero(g);
  double lo = 1e300, hi = -1e300;
  for (double r : {0.2, 0.4, 0.8}) {
    double w = weiss(u, zero, 0.0, origin, r);
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  EXPECT_LE(hi - lo, 1e-2 * std::abs(hi));
}

TEST(Weiss, ScalingIdentityOnRescaledFields)
{
  GridSpec g = square(1.0, 513);
  const double lambda = 0.5;
  ScalarField u = ScalarField::sample(g, [](const Point& x) {
    return 0.5 * std::pow(std::max(x[1], 0.0), 2) + 0.2 * std::pow(std::max(x[0] + x[1], 0.0), 3);
  });
  ScalarField v = ScalarField::sample(g, [](const Point& x) { return 0.2 + x[0] + 0.5 * x[1] * x[1]; });
  for (auto [r, rho] : {std::pair{0.5, 0.5}, std::pair{0.8, 0.25}, std::pair{0.4, 0.9}}) {
    double direct = weiss(u, v, lambda, origin, r * rho);
    RescaledField ur = rescale(u, origin, r, 257);
    GridSpec rg = ur.field.grid();
    ScalarField vr = ScalarField::sample(rg, [&](const Point& y) { return interpolate(v, r * y); });
    ScalarField uf = ur.field; // outside the unit ball the samples are zero, which the ball never reaches
    double scaled = weiss(uf, vr, lambda, origin, rho);
    EXPECT_NEAR(scaled, direct, 1e-2 * std::abs(direct)) << "r=" << r << " rho=" << rho;
  }
}

TEST(WeissF1, VanishesForZeroLambdaOrConstantV)
{
  GridSpec g = square(1.0, 65);
  ScalarField u = half_space(g);
  ScalarField v = ScalarField::sample(g, [](const Point& x) { return x[0]; });
  EXPECT_EQ(weiss_f1(u, v, 0.0, origin, 0.5), 0.0);
  EXPECT_NEAR(weiss_f1(u, ScalarField(g, 0.3), 1.0, origin, 0.5), 0.0, 1e-14);
}

TEST(WeissF1, ManufacturedClosedForm)
{
  // u = (x1^+)^2 / 2, v = x1: f1 = int_{half disk} y1^3 / 2 = 2/15 for every s, F1(1/4) = 1/30
  GridSpec g = square(0.5, 513);
  ScalarField u = ScalarField::sample(g, [](const Point& x) { return 0.5 * std::pow(std::max(x[0], 0.0), 2); });
  ScalarField v = ScalarField::sample(g, [](const Point& x) { return x[0]; });
  EXPECT_NEAR(weiss_f1(u, v, 1.0, origin, 0.25), 1.0 / 30.0, 1e-2 / 30.0);
}

TEST(Monneau, ZeroForExactPolynomial)
{
  GridSpec g = square(1.0, 129);
  // zero at the nodes; off-node samples carry the bilinear interpolation error of a quadratic
  EXPECT_NEAR(monneau(x1_squared(g), form(0.5, 0.0, 0.0), origin, 0.5), 0.0, 1e-6);
}

TEST(Monneau, QuadraticDeviationIsConstant)
{
  GridSpec g = square(1.0, 257);
  const double c = 0.3;
  ScalarField u = ScalarField::sample(g, [&](const Point& x) { return 0.5 * x[0] * x[0] + c * (x[0] * x[0] + x[1] * x[1]); });
  for (double r : {0.2, 0.5, 0.9})
    EXPECT_NEAR(monneau(u, form(0.5, 0.0, 0.0), origin, r), 2.0 * M_PI * c * c, 5e-3 * 2.0 * M_PI * c * c);
}

TEST(Monneau, CrossedPolynomials)
{
  // (x1^2 - x2^2)^2 / 4 = cos^2(2 theta) / 4 on the unit circle, which integrates to pi / 4
  GridSpec g = square(1.0, 513);
  EXPECT_NEAR(monneau(x1_squared(g), form(0.0, 0.0, 0.5), origin, 1.0), M_PI / 4.0, 5e-3 * M_PI / 4.0);
}

TEST(Monneau, NonPsdPolynomialRejected)
{
  GridSpec g = square(1.0, 33);
  EXPECT_THROW(monneau(x1_squared(g), form(0.5, 0.0, -0.1), origin, 0.5), Error);
}

TEST(MonneauCorrections, VanishForZeroLambdaOrFrozenV)
{
  GridSpec g = square(1.0, 65);
  auto c = monneau_corrections(half_space(g), ScalarField(g, 1.0), 0.0, form(0, 0, 0.5), origin, 0.5);
  EXPECT_EQ(c.ftilde, 0.0);
  EXPECT_EQ(c.fbar, 0.0);
  auto d = monneau_corrections(half_space(g), ScalarField(g, 1.0), 2.0, form(0, 0, 0.5), origin, 0.5);
  EXPECT_NEAR(d.ftilde, 0.0, 1e-14);
}

TEST(MonneauCorrections, ManufacturedClosedForm)
{
  // u = (x1^+)^2/2, v = x1, q = x1^2/2: ftilde = 8/15 and F1(t) = 2t/15, so both corrections equal 2/15 at r = 1/4
  GridSpec g = square(0.5, 1025);
  ScalarField u = ScalarField::sample(g, [](const Point& x) { return 0.5 * std::pow(std::max(x[0], 0.0), 2); });
  ScalarField v = ScalarField::sample(g, [](const Point& x) { return x[0]; });
  auto c = monneau_corrections(u, v, 1.0, form(0.5, 0, 0), origin, 0.25, {}, 1e-6);
  EXPECT_NEAR(c.ftilde, 2.0 / 15.0, 1e-2 * 2.0 / 15.0);
  EXPECT_NEAR(c.fbar, 2.0 / 15.0, 1e-2 * 2.0 / 15.0);
}

TEST(Audit, HalfSpaceIsFlatWithoutViolations)
{
  GridSpec g = square(1.0, 257);
  std::vector<double> radii;
  for (int k = 1; k <= 16; ++k)
    radii.push_back(0.05 * k);
  EnergyReport rep = audit_weiss(half_space(g), ScalarField(g), 0.0, origin, radii);
  EXPECT_TRUE(rep.violations.empty());
  EXPECT_TRUE(rep.center_on_free_boundary);
  auto [lo, hi] = std::minmax_element(rep.w_corrected.begin(), rep.w_corrected.end());
  EXPECT_LE(*hi - *lo, 1e-3);
}

TEST(Audit, ReversedRadiiRejected)
{
  GridSpec g = square(1.0, 33);
  try {
    audit_weiss(half_space(g), ScalarField(g), 0.0, origin, {0.5, 0.25});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config);
  }
}

TEST(Audit, DecreasingProfileIsReported)
{
  // a constant c > 0 is no solution: W is proportional to 2 pi c / r^2 - 4 pi c^2 / r^4, decreasing for r > 2 sqrt(c)
  GridSpec g = square(1.0, 129);
  ScalarField u(g, 0.01);
  EnergyReport rep = audit_weiss(u, ScalarField(g), 0.0, origin, {0.3, 0.5, 0.8});
  EXPECT_FALSE(rep.center_on_free_boundary);
  EXPECT_FALSE(rep.violations.empty());
}

TEST(Audit, MonneauOnPerturbedPolynomial)
{
  GridSpec g = square(0.5, 129);
  ScalarField u = ScalarField::sample(g, [](const Point& x) {
    return 0.5 * x[0] * x[0] + 1e-2 * std::pow(std::hypot(x[0], x[1]), 3);
  });
  std::vector<double> radii;
  for (double r = 8.0 / 128; r <= 0.25 + 1e-12; r += 2.0 / 128)
    radii.push_back(r);
  EnergyReport rep = audit_monneau(u, ScalarField(g), 0.0, form(0.5, 0, 0), origin, radii);
  EXPECT_EQ(rep.violation_count(AuditKind::Monneau), 0u);
  // exact M = 2 pi 1e-4 r^2; below r = 0.1 the interpolation floor of the quadratic part dominates
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (radii[i - 1] >= 0.1)
      EXPECT_GT(rep.m_corrected[i], rep.m_corrected[i - 1]);
  EXPECT_NEAR(rep.m_raw.back(), 2.0 * M_PI * 1e-4 * 0.0625, 0.1 * 2.0 * M_PI * 1e-4 * 0.0625);
}

TEST(Audit, CsvLayout)
{
  GridSpec g = square(1.0, 33);
  EnergyReport rep = audit_monneau(half_space(g), ScalarField(g), 0.0, form(0, 0, 0.5), origin, {0.25, 0.5});
  std::ostringstream os;
  write_energy_csv(os, rep);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "r,W_raw,F1,W_corrected,M_raw,Ftilde,Fbar,M_corrected");
}

TEST(Acf, SplitLinearField)
{
  GridSpec g = square(1.0, 129);
  ScalarField wp = ScalarField::sample(g, [](const Point& x) { return std::max(x[1], 0.0); });
  ScalarField wm = ScalarField::sample(g, [](const Point& x) { return std::max(-x[1], 0.0); });
  for (double r : {0.2, 0.4, 0.8})
    EXPECT_NEAR(acf(wp, wm, origin, r), M_PI * M_PI / 4.0, 1e-2 * M_PI * M_PI / 4.0);
}

TEST(Acf, VanishingSign)
{
  GridSpec g = square(1.0, 129);
  ScalarField wp = ScalarField::sample(g, [](const Point& x) { return std::max(x[1], 0.0); });
  EXPECT_LE(acf(wp, ScalarField(g), origin, 0.5), 1e-12);
  // the tangential derivative of the half-space solution is identically zero
  ScalarField d1 = partial_derivative(half_space(g), 0);
  ScalarField plus(g), minus(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    plus[k] = std::max(d1[k], 0.0);
    minus[k] = std::max(-d1[k], 0.0);
  }
  EXPECT_LE(acf(plus, minus, origin, 0.5), 1e-12);
}

TEST(Acf, SymmetryAndQuarticScaling)
{
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  GridSpec g = square(1.0, 65);
  for (int trial = 0; trial < 5; ++trial) {
    double a = d(rng), b = d(rng), c = d(rng);
    ScalarField w = ScalarField::sample(g, [&](const Point& x) { return a * x[0] + b * x[1] + c * x[0] * x[1]; });
    ScalarField wp(g), wm(g), wp2(g), wm2(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
      wp[k] = std::max(w[k], 0.0);
      wm[k] = std::max(-w[k], 0.0);
      wp2[k] = 2.0 * wp[k];
      wm2[k] = 2.0 * wm[k];
    }
    double phi = acf(wp, wm, origin, 0.6);
    EXPECT_NEAR(acf(wm, wp, origin, 0.6), phi, 1e-12 * phi);
    EXPECT_NEAR(acf(wp2, wm2, origin, 0.6), 16.0 * phi, 1e-10 * 16.0 * phi);
  }
}

TEST(Acf, OverlappingSupportsRejected)
{
  GridSpec g = square(1.0, 17);
  ScalarField w(g, 1.0);
  EXPECT_THROW(acf(w, w, origin, 0.5), Error);
  ScalarField neg(g, -1.0);
  EXPECT_THROW(acf(neg, ScalarField(g), origin, 0.5), Error);
}
