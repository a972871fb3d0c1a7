#include "fblab/oracle.hpp"
#include "fblab/solver.hpp"

#include <gtest/gtest.h>

using namespace fblab;

TEST(ClosedForm1D, ClassicalOffsets)
{
  EXPECT_NEAR(oracle::closed_form_1d(0.0, 0.125).a, 0.5, 1e-12);
  EXPECT_NEAR(oracle::closed_form_1d(0.0, 0.5).a, 0.0, 1e-12);
  auto cf = oracle::closed_form_1d(0.0, 0.02);
  EXPECT_NEAR(cf.a, 0.8, 1e-12);
  EXPECT_NEAR(cf.value(1.0), 0.02, 1e-14);
  EXPECT_EQ(cf.value(0.3), 0.0);
}

TEST(ClosedForm1D, CoshBranchSatisfiesOde)
{
  for (double lambda : {0.5, 1.0, 4.0}) {
    double g = (std::cosh(0.5 * std::sqrt(lambda)) - 1.0) / lambda;
    auto cf = oracle::closed_form_1d(lambda, g);
    EXPECT_EQ(cf.kind, oracle::ClosedFormKind::CoshCoupled);
    EXPECT_NEAR(cf.a, 0.5, 1e-12);
    EXPECT_NEAR(cf.value(1.0), g, 1e-13);
    for (double x : {0.55, 0.7, 0.9, -0.8})
      EXPECT_NEAR(cf.second_derivative(x), 1.0 + lambda * cf.value(x), 1e-12);
    // second differences of the profile agree with the stated derivative
    const double d = 1e-4;
    for (double x : {0.6, 0.8}) {
      double fd = (cf.value(x + d) - 2 * cf.value(x) + cf.value(x - d)) / (d * d);
      EXPECT_NEAR(fd, cf.second_derivative(x), 1e-5);
    }
    EXPECT_EQ(cf.value(0.2), 0.0);
  }
}

TEST(ClosedForm1D, NoContactBranch)
{
  auto cf = oracle::closed_form_1d(0.0, 1.0);
  EXPECT_FALSE(cf.contact);
  EXPECT_NEAR(cf.value(1.0), 1.0, 1e-14);
  EXPECT_NEAR(cf.value(0.0), 0.5, 1e-14);
  auto ch = oracle::closed_form_1d(1.0, 2.0);
  EXPECT_FALSE(ch.contact);
  EXPECT_NEAR(ch.value(-1.0), 2.0, 1e-13);
  EXPECT_NEAR(ch.second_derivative(0.3), 1.0 + ch.value(0.3), 1e-12);
}

TEST(ClosedForm1D, NegativeLambdaIsExperimental)
{
  auto cf = oracle::closed_form_1d(-1.0, 0.1);
  EXPECT_EQ(cf.kind, oracle::ClosedFormKind::CosCoupled);
  EXPECT_TRUE(cf.experimental);
  EXPECT_NEAR(cf.value(1.0), 0.1, 1e-12);
  EXPECT_FALSE(oracle::closed_form_1d(1.0, 0.1).experimental);
  EXPECT_THROW(oracle::closed_form_1d(0.0, 0.0), Error);
}

TEST(ClosedFormRadial, SolvesObstacleEquation)
{
  auto p = oracle::closed_form_radial(0.25, 0.5);
  for (double r : {0.26, 0.3, 0.4, 0.7})
    EXPECT_NEAR(p.laplacian(r), 1.0, 1e-12);
  EXPECT_EQ(p.value(0.2), 0.0);
  EXPECT_EQ(p.value(0.25), 0.0);
  EXPECT_NEAR(p.derivative(0.25 + 1e-9), 0.0, 1e-8);
  EXPECT_NEAR(p.second_derivative(0.25 + 1e-12), 1.0, 1e-10);
  EXPECT_GT(p.value(0.3), 0.0);
  EXPECT_THROW(oracle::closed_form_radial(0.6, 0.5), Error);
}

TEST(BruteForce, MatchesComplementaritySolver)
{
  GridSpec g = grid_1d(0.0, 1.0, 33);
  auto b = make_boundary_data(
    g, [](const Point& x) { return x[0] < 0.5 ? 0.02 : 0.03; }, [](const Point& x) { return x[0] < 0.5 ? 0.03 : 0.01; });
  for (double lambda : {0.0, 0.5, 1.0, -5.0}) {
    SolverConfig cfg;
    cfg.tol = 1e-12;
    SolutionPair s = solve_coupled(b, {lambda, 0.0}, cfg);
    auto bf = oracle::brute_force_minimize(g, b.g1, b.g2, lambda);
    EXPECT_LE(max_abs_diff(s.u, bf.u), 1e-6) << lambda;
    EXPECT_LE(max_abs_diff(s.v, bf.v), 1e-6) << lambda;
  }
}

TEST(BruteForce, TwoDimensionalAndContact)
{
  GridSpec g = grid_2d({-1, 1}, {-1, 1}, 17, 17);
  auto b = make_boundary_data(g, [](const Point&) { return 0.05; }, [](const Point& x) { return 0.05 + 0.05 * x[0]; });
  SolverConfig cfg;
  cfg.tol = 1e-12;
  SolutionPair s = solve_coupled(b, {0.5, 0.0}, cfg);
  auto bf = oracle::brute_force_minimize(g, b.g1, b.g2, 0.5);
  EXPECT_LE(std::max(max_abs_diff(s.u, bf.u), max_abs_diff(s.v, bf.v)), 1e-6);
  bool contact = false;
  for (std::size_t k : g.interior_indices())
    contact = contact || bf.u[k] == 0.0;
  EXPECT_TRUE(contact);
}

TEST(BruteForce, GridLimitAndAdmissibility)
{
  GridSpec big = grid_1d(0.0, 1.0, 65);
  ScalarField z(big);
  EXPECT_THROW(oracle::brute_force_minimize(big, z, z, 0.0), Error);
  GridSpec g = grid_1d(0.0, 1.0, 33);
  ScalarField c(g, 0.1);
  try {
    oracle::brute_force_minimize(g, c, c, -20.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::admissibility);
  }
}
