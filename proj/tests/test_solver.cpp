#include "fblab/energy.hpp"
#include "fblab/oracle.hpp"
#include "fblab/smoothing.hpp"
#include "fblab/solver.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace fblab;

namespace {

BoundaryData constant_data(const GridSpec& g, double a, double b)
{
  return make_boundary_data(g, [&](const Point&) { return a; }, [&](const Point&) { return b; });
}

SolverConfig fast(const GridSpec& g)
{
  SolverConfig c;
  c.omega = sor_omega_estimate(g);
  return c;
}

ErrorKind kind_of(auto&& f)
{
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::config;
}

double simpson(auto&& f, double a, double b, int n = 2000)
{
  double h = (b - a) / n, s = f(a) + f(b);
  for (int i = 1; i < n; ++i)
    s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

} // namespace

TEST(Smoothing, HeavisideEndpointsAndMidpoint)
{
  for (double eps : {1e-3, 0.1, 1.0}) {
    EXPECT_EQ(smooth_heaviside(-eps, eps), 0.0);
    EXPECT_EQ(smooth_heaviside(eps, eps), 1.0);
    EXPECT_DOUBLE_EQ(smooth_heaviside(0.0, eps), 0.5);
    EXPECT_EQ(smooth_heaviside(-3 * eps, eps), 0.0);
    EXPECT_EQ(smooth_heaviside(3 * eps, eps), 1.0);
  }
}

TEST(Smoothing, MonotoneAndDerivativeConsistent)
{
  const double eps = 0.2;
  double prev = 0.0;
  for (int i = 0; i <= 400; ++i) {
    double s = -0.3 + 0.6 * i / 400.0;
    double v = smooth_heaviside(s, eps);
    EXPECT_GE(v, prev);
    prev = v;
    double fd = (smooth_heaviside(s + 1e-6, eps) - smooth_heaviside(s - 1e-6, eps)) / 2e-6;
    EXPECT_NEAR(smooth_heaviside_derivative(s, eps), fd, 1e-5);
    EXPECT_GE(smooth_heaviside_derivative(s, eps), 0.0);
  }
}

TEST(Smoothing, PrimitiveMatchesQuadrature)
{
  const double eps = 0.1;
  EXPECT_EQ(smooth_primitive(-2 * eps, eps), 0.0);
  EXPECT_NEAR(smooth_primitive(eps, eps), eps, 1e-15);
  EXPECT_NEAR(smooth_primitive(eps, eps), simpson([&](double t) { return smooth_heaviside(t, eps); }, -eps, eps),
              1e-12);
  EXPECT_NEAR(smooth_primitive(5.0, 1e-3), 5.0, 1e-12);
  for (double s : {-0.05, 0.0, 0.03, 0.09})
    EXPECT_NEAR(smooth_primitive(s, eps), simpson([&](double t) { return smooth_heaviside(t, eps); }, -eps, s),
                1e-12);
  EXPECT_NEAR(smooth_primitive(0.0, eps), 3.0 * eps / 16.0, 1e-15);
}

TEST(ScalarObstacle, ClassicalClosedForm)
{
  for (int n : {65, 129}) {
    GridSpec g = grid_1d(-1, 1, n);
    ScalarField gb(g);
    gb[0] = gb[n - 1] = 0.125;
    ScalarField u = solve_scalar_obstacle(ScalarField(g, 1.0), gb, fast(g));
    double h = g.h(0), err = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      double x = g.coords(k)[0];
      err = std::max(err, std::abs(u[k] - 0.5 * std::pow(std::max(std::abs(x) - 0.5, 0.0), 2)));
    }
    EXPECT_LE(err, 2.0 * h * h);
  }
}

TEST(ScalarObstacle, ZeroDataGivesZero)
{
  GridSpec g = grid_2d({0, 1}, {0, 1}, 17, 17);
  ScalarField u = solve_scalar_obstacle(ScalarField(g, 1.0), ScalarField(g), fast(g));
  EXPECT_EQ(u.max_abs(), 0.0);
}

TEST(ScalarObstacle, NoContactParabola)
{
  GridSpec g = grid_1d(-1, 1, 65);
  ScalarField gb(g);
  gb[0] = gb[64] = 1.0;
  ScalarField u = solve_scalar_obstacle(ScalarField(g, 1.0), gb, fast(g));
  for (std::size_t k = 0; k < g.size(); ++k) {
    double x = g.coords(k)[0];
    EXPECT_NEAR(u[k], 0.5 * (x * x + 1.0), 1e-9);
  }
}

TEST(ScalarObstacle, NegativeCoefficientRejected)
{
  GridSpec g = grid_1d(0, 1, 9);
  ScalarField c(g, 1.0);
  c[4] = -0.5;
  EXPECT_EQ(kind_of([&] { solve_scalar_obstacle(c, ScalarField(g), SolverConfig{}); }), ErrorKind::admissibility);
}

TEST(ScalarObstacle, NonConvergenceIsNumericalError)
{
  GridSpec g = grid_1d(-1, 1, 129);
  ScalarField gb(g);
  gb[0] = gb[128] = 0.125;
  SolverConfig cfg;
  cfg.max_sweeps = 8;
  EXPECT_EQ(kind_of([&] { solve_scalar_obstacle(ScalarField(g, 1.0), gb, cfg); }), ErrorKind::numerical);
}

TEST(ScalarObstacle, ConvergedStartIsReturnedUntouched)
{
  GridSpec g = grid_1d(-1, 1, 65);
  ScalarField gb(g);
  gb[0] = gb[64] = 0.125;
  auto first = solve_scalar_obstacle_detailed(ScalarField(g, 1.0), gb, fast(g));
  auto again = solve_scalar_obstacle_detailed(ScalarField(g, 1.0), gb, fast(g), &first.u);
  EXPECT_EQ(again.sweeps, 0);
  EXPECT_EQ(max_abs_diff(first.u, again.u), 0.0);
}

TEST(Coupled, LambdaZeroIsBitIdenticalToScalarSolves)
{
  GridSpec g = grid_2d({-1, 1}, {-1, 1}, 33, 33);
  auto b = make_boundary_data(
    g, [](const Point& x) { return 0.1 + 0.05 * x[0]; }, [](const Point& x) { return 0.2 * x[1] * x[1]; });
  SolverConfig cfg = fast(g);
  SolutionPair s = solve_coupled(b, {0.0, 0.0}, cfg);
  ScalarField u = solve_scalar_obstacle(ScalarField(g, 1.0), b.g1, cfg);
  ScalarField v = solve_scalar_obstacle(ScalarField(g, 1.0), b.g2, cfg);
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_EQ(s.u[k], u[k]);
    EXPECT_EQ(s.v[k], v[k]);
  }
}

TEST(Coupled, CoshClosedForm)
{
  GridSpec g = grid_1d(-1, 1, 257);
  double gv = std::cosh(0.5) - 1.0;
  auto cf = oracle::closed_form_1d(1.0, gv);
  EXPECT_NEAR(cf.a, 0.5, 1e-12);
  SolutionPair s = solve_coupled(constant_data(g, gv, gv), {1.0, 0.0}, fast(g));
  double h = g.h(0), err = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k)
    err = std::max(err, std::abs(s.u[k] - cf.value(g.coords(k)[0])));
  EXPECT_LE(err, 4.0 * h * h);
  EXPECT_TRUE(s.coupling_u_ok);
  EXPECT_TRUE(s.coupling_v_ok);
}

TEST(Coupled, SemiTrivialPairWarns)
{
  GridSpec g = grid_1d(-1, 1, 65);
  SolutionPair s = solve_coupled(constant_data(g, 0.0, 0.125), {1.0, 0.0}, fast(g));
  EXPECT_EQ(s.u.max_abs(), 0.0);
  ScalarField v = solve_scalar_obstacle(ScalarField(g, 1.0), s.v, fast(g));
  EXPECT_LE(max_abs_diff(s.v, v), 1e-10);
  EXPECT_FALSE(s.warnings.empty());
}

TEST(Coupled, InadmissibleLambdaRejected)
{
  GridSpec g = grid_2d({0, 1}, {0, 1}, 65, 65);
  try {
    solve_coupled(constant_data(g, 0.1, 0.1), {-25.0, 0.0}, SolverConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::admissibility);
    EXPECT_NE(std::string(e.what()).find("19.7"), std::string::npos) << e.what();
  }
}

TEST(Coupled, NegativeCoefficientInsidePositivitySetRejected)
{
  // lambda = -2 with data 1 makes 1 + lambda v < 0 where u > 0
  GridSpec g = grid_1d(0, 1, 33);
  EXPECT_EQ(kind_of([&] { solve_coupled(constant_data(g, 1.0, 1.0), {-2.0, 0.0}, fast(g)); }),
            ErrorKind::admissibility);
}

TEST(Coupled, OuterNonConvergenceIsNumericalError)
{
  GridSpec g = grid_1d(-1, 1, 65);
  SolverConfig cfg = fast(g);
  cfg.max_outer = 1;
  EXPECT_EQ(kind_of([&] { solve_coupled(constant_data(g, 0.2, 0.2), {1.0, 0.0}, cfg); }), ErrorKind::numerical);
}

class CoupledProperties : public ::testing::TestWithParam<double>
{};

TEST_P(CoupledProperties, NonnegativityComplementarityAndBoundary)
{
  const double lambda = GetParam();
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> d(0.0, 0.15);
  GridSpec g = grid_2d({0, 1}, {0, 1}, 33, 33);
  for (int trial = 0; trial < 3; ++trial) {
    double a1 = d(rng), a2 = d(rng), b1 = d(rng), b2 = d(rng);
    auto b = make_boundary_data(
      g, [&](const Point& x) { return a1 + a2 * x[0] * x[1]; }, [&](const Point& x) { return b1 * x[0] + b2; });
    SolverConfig cfg = fast(g);
    SolutionPair s = solve_coupled(b, {lambda, 0.0}, cfg);
    for (std::size_t k = 0; k < g.size(); ++k) {
      EXPECT_GE(s.u[k], 0.0);
      EXPECT_GE(s.v[k], 0.0);
    }
    for (std::size_t k : g.boundary_indices()) {
      EXPECT_EQ(s.u[k], b.g1[k]);
      EXPECT_EQ(s.v[k], b.g2[k]);
    }
    for (std::size_t k : g.interior_indices()) {
      double ru = std::min(s.u[k], 1.0 + lambda * s.v[k] - laplacian_at(s.u, k));
      double rv = std::min(s.v[k], 1.0 + lambda * s.u[k] - laplacian_at(s.v, k));
      // the outer loop stops on iterate change, so allow one more tol for the frozen partner
      EXPECT_LE(std::abs(ru), 1e-8 * (1.0 + s.u.max_abs()));
      EXPECT_LE(std::abs(rv), 1e-8 * (1.0 + s.v.max_abs()));
    }
  }
}

TEST_P(CoupledProperties, SymmetricDataGivesSymmetricPair)
{
  const double lambda = GetParam();
  GridSpec g = grid_2d({-0.5, 0.5}, {-0.5, 0.5}, 33, 33);
  auto prof = oracle::closed_form_radial(0.25, 0.5);
  SolverConfig cfg = fast(g);
  SolutionPair s = solve_coupled(make_boundary_data(g, prof, prof), {lambda, 0.0}, cfg);
  EXPECT_LE(max_abs_diff(s.u, s.v), 10.0 * cfg.tol);
}

TEST_P(CoupledProperties, MinimalityAgainstRandomPerturbations)
{
  const double lambda = GetParam();
  GridSpec g = grid_2d({0, 1}, {0, 1}, 17, 17);
  auto b = make_boundary_data(
    g, [](const Point& x) { return 0.1 * (1.0 + x[0]); }, [](const Point& x) { return 0.08 + 0.05 * x[1]; });
  SolverConfig cfg = fast(g);
  cfg.tol = 1e-12;
  SolutionPair s = solve_coupled(b, {lambda, 0.0}, cfg);
  const double j0 = energy_J(s.u, s.v, lambda);
  const double scale = 1.0 + std::abs(j0);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> d(-0.02, 0.02);
  auto interior = g.interior_indices();
  for (int trial = 0; trial < 50; ++trial) {
    ScalarField up = s.u;
    for (std::size_t k : interior)
      up[k] = std::max(0.0, up[k] + d(rng));
    EXPECT_GE(energy_J(up, s.v, lambda), j0 - 1e-8 * scale);
  }
}

INSTANTIATE_TEST_SUITE_P(Lambdas, CoupledProperties, ::testing::Values(0.0, 0.5, -2.0));

TEST(Coupled, LaplacianJumpAwayFromFreeBoundary)
{
  GridSpec g = grid_2d({-0.5, 0.5}, {-0.5, 0.5}, 65, 65);
  auto prof = oracle::closed_form_radial(0.25, 0.5);
  const double lambda = 0.1;
  SolverConfig cfg = fast(g);
  SolutionPair s = solve_coupled(make_boundary_data(g, prof, prof), {lambda, 0.0}, cfg);
  const double h = g.h_max(), thr = cfg.positivity_kappa * h * h;
  const std::size_t nx = 65;
  int checked = 0;
  for (std::size_t k : g.interior_indices()) {
    if (!(s.u[k] > thr && s.u[k - 1] > thr && s.u[k + 1] > thr && s.u[k - nx] > thr && s.u[k + nx] > thr))
      continue;
    ++checked;
    EXPECT_LE(std::abs(laplacian_at(s.u, k) - (1.0 + lambda * s.v[k])), 0.05 * (1.0 + lambda * s.v.max_abs()));
  }
  EXPECT_GT(checked, 100);
}

TEST(Regularized, LambdaZeroCloseToProjectedSolve)
{
  GridSpec g = grid_1d(-1, 1, 129);
  auto b = constant_data(g, 0.125, 0.125);
  SolverConfig cfg = fast(g);
  SolutionPair r = solve_regularized(b, {0.0, 0.0}, 1e-3, cfg);
  ScalarField u = solve_scalar_obstacle(ScalarField(g, 1.0), b.g1, cfg);
  EXPECT_LE(max_abs_diff(r.u, u), 5e-3);
}

TEST(Regularized, EpsilonRefinementIsCauchy)
{
  GridSpec g = grid_1d(-1, 1, 65);
  auto b = constant_data(g, 0.125, 0.1);
  SolverConfig cfg = fast(g);
  std::vector<ScalarField> us;
  std::optional<SolutionPair> prev;
  for (double eps : {4e-2, 2e-2, 1e-2, 5e-3, 2.5e-3}) {
    prev = solve_regularized(b, {0.5, 0.0}, eps, cfg, prev ? &*prev : nullptr);
    us.push_back(prev->u);
  }
  double last = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < us.size(); ++i) {
    double inc = max_abs_diff(us[i], us[i - 1]);
    EXPECT_LT(inc, last);
    last = inc;
  }
}

TEST(Regularized, ZeroDataDipsOrderEpsilon)
{
  GridSpec g = grid_1d(0, 1, 17);
  for (double eps : {1e-2, 1e-3}) {
    SolutionPair r = solve_regularized(constant_data(g, 0.0, 0.0), {0.0, 0.0}, eps, fast(g));
    EXPECT_GT(r.u.max_abs(), 0.0);
    EXPECT_LE(r.u.max_abs(), eps);
  }
}

TEST(Regularized, MinimizesSmoothedEnergy)
{
  GridSpec g = grid_1d(0, 1, 17);
  auto b = constant_data(g, 0.05, 0.03);
  const double eps = 1e-2, lambda = 0.5;
  SolutionPair r = solve_regularized(b, {lambda, 0.0}, eps, fast(g));
  const double j0 = energy_Jeps(r.u, r.v, lambda, eps);
  std::mt19937 rng(2);
  std::normal_distribution<double> d(0.0, 1e-3);
  for (int trial = 0; trial < 20; ++trial) {
    ScalarField up = r.u, vp = r.v;
    for (std::size_t k : g.interior_indices()) {
      up[k] += d(rng);
      vp[k] += d(rng);
    }
    EXPECT_GE(energy_Jeps(up, vp, lambda, eps), j0 - 1e-12);
  }
}

TEST(Continuation, ClassicalEqualsProjectedSolve)
{
  GridSpec g = grid_1d(-1, 1, 129);
  auto b = constant_data(g, 0.125, 0.125);
  SolverConfig cfg = fast(g);
  SolutionPair c = continuation_solve(b, {0.0, 0.0}, cfg);
  ScalarField u = solve_scalar_obstacle(ScalarField(g, 1.0), b.g1, cfg);
  EXPECT_LE(max_abs_diff(c.u, u), 1e-8);
}

TEST(Continuation, CoshCaseSecondOrder)
{
  GridSpec g = grid_1d(-1, 1, 129);
  double gv = std::cosh(0.5) - 1.0;
  auto cf = oracle::closed_form_1d(1.0, gv);
  SolutionPair c = continuation_solve(constant_data(g, gv, gv), {1.0, 0.0}, fast(g));
  double h = g.h(0), err = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k)
    err = std::max(err, std::abs(c.u[k] - cf.value(g.coords(k)[0])));
  EXPECT_LE(err, 4.0 * h * h);
}

TEST(Continuation, SingleLargeEpsilonStillPolished)
{
  GridSpec g = grid_1d(-1, 1, 65);
  SolverConfig cfg = fast(g);
  cfg.eps_schedule = {1.0};
  SolutionPair c = continuation_solve(constant_data(g, 0.125, 0.2), {0.5, 0.0}, cfg);
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_GE(c.u[k], 0.0);
    EXPECT_GE(c.v[k], 0.0);
  }
  EXPECT_LE(c.residual_u, 1e-8);
  EXPECT_LE(c.residual_v, 1e-8);
}

TEST(Config, InvalidSolverSettingsRejected)
{
  SolverConfig c;
  c.omega = 2.0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.eps_schedule = {1e-2, 1e-1};
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.tol = 0.0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Sweep, ZeroEntryAndDecreasing)
{
  GridSpec g = grid_2d({-0.5, 0.5}, {-0.5, 0.5}, 33, 33);
  auto prof = oracle::closed_form_radial(0.25, 0.5);
  auto b = make_boundary_data(g, prof, prof);
  ConvergenceReport rep = sweep_lambda(b, {0.0, 0.2, 0.1, 0.05, 0.025}, fast(g));
  EXPECT_EQ(rep.entries[0].linf, 0.0);
  EXPECT_EQ(rep.entries[0].grad_norm, 0.0);
  for (std::size_t i = 2; i < rep.entries.size(); ++i)
    EXPECT_LT(rep.entries[i].linf, rep.entries[i - 1].linf);
  EXPECT_NEAR(rep.loglog_slope, 1.0, 0.1);
}

TEST(Sweep, CompetitiveSideDecreasing)
{
  GridSpec g = grid_2d({0, 1}, {0, 1}, 33, 33);
  auto b = constant_data(g, 0.1, 0.1);
  ConvergenceReport rep = sweep_lambda(b, {-0.2, -0.1, -0.05}, fast(g));
  EXPECT_GT(rep.lambda1, 19.0);
  for (std::size_t i = 1; i < rep.entries.size(); ++i)
    EXPECT_LT(rep.entries[i].linf, rep.entries[i - 1].linf);
}
