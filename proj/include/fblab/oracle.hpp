#pragma once

// Reference solutions used as ground truth by the tests and the oracle-check
// command. Nothing here calls into the solver or energy code.

#include "fblab/eigenvalue.hpp"
#include "fblab/error.hpp"
#include "fblab/grid.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace fblab::oracle {

enum class ClosedFormKind
{
  Classical,   ///< u'' = 1 on {u > 0}
  CoshCoupled, ///< u'' = 1 + lambda u on {u > 0}, lambda > 0
  CosCoupled   ///< lambda < 0; unchecked reference profile
};

/**
 * Even solution on [-1, 1] of the symmetric reduction u'' = 1 + lambda u on
 * {u > 0}, u = 0 on [-a, a], u(+-1) = g. With contact (a > 0):
 *   Classical:   u = ((|x| - a)^+)^2 / 2,                  a = 1 - sqrt(2 g)
 *   CoshCoupled: u = (cosh(sqrt(lambda) (|x| - a)^+) - 1) / lambda,
 *                cosh(sqrt(lambda) (1 - a)) = 1 + lambda g
 * Without contact the positive even profile through (+-1, g) is used and
 * `contact` is false.
 */
struct ClosedForm1D
{
  double lambda = 0.0;
  double a = 0.0;
  double g = 0.0;
  ClosedFormKind kind = ClosedFormKind::Classical;
  bool contact = true;
  bool experimental = false;
  double amp = 0.0; // no-contact profile amplitude

  double value(double x) const
  {
    const double t = std::abs(x);
    if (!contact) {
      switch (kind) {
        case ClosedFormKind::Classical: return 0.5 * x * x + amp;
        case ClosedFormKind::CoshCoupled: return amp * std::cosh(std::sqrt(lambda) * x) - 1.0 / lambda;
        case ClosedFormKind::CosCoupled: return amp * std::cos(std::sqrt(-lambda) * x) - 1.0 / lambda;
      }
    }
    const double s = std::max(t - a, 0.0);
    switch (kind) {
      case ClosedFormKind::Classical: return 0.5 * s * s;
      case ClosedFormKind::CoshCoupled: return (std::cosh(std::sqrt(lambda) * s) - 1.0) / lambda;
      case ClosedFormKind::CosCoupled: return (1.0 - std::cos(std::sqrt(-lambda) * s)) / (-lambda);
    }
    return 0.0;
  }

  double second_derivative(double x) const
  {
    const double t = std::abs(x);
    if (!contact) {
      switch (kind) {
        case ClosedFormKind::Classical: return 1.0;
        case ClosedFormKind::CoshCoupled: return amp * lambda * std::cosh(std::sqrt(lambda) * x);
        case ClosedFormKind::CosCoupled: return amp * lambda * std::cos(std::sqrt(-lambda) * x);
      }
    }
    if (t <= a)
      return 0.0;
    const double s = t - a;
    switch (kind) {
      case ClosedFormKind::Classical: return 1.0;
      case ClosedFormKind::CoshCoupled: return std::cosh(std::sqrt(lambda) * s);
      case ClosedFormKind::CosCoupled: return std::cos(std::sqrt(-lambda) * s);
    }
    return 0.0;
  }
};

/// Bisection root of a monotone function on [lo, hi] to absolute tolerance tol.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-14)
{
  double flo = f(lo);
  if (flo == 0.0)
    return lo;
  if (f(hi) == 0.0)
    return hi;
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline ClosedForm1D closed_form_1d(double lambda, double g)
{
  require(g > 0.0, ErrorKind::config, "closed form needs g > 0");
  ClosedForm1D cf;
  cf.lambda = lambda;
  cf.g = g;
  cf.kind = lambda == 0.0 ? ClosedFormKind::Classical
            : lambda > 0.0 ? ClosedFormKind::CoshCoupled
                           : ClosedFormKind::CosCoupled;
  cf.experimental = lambda < 0.0;

  // boundary value of the contact profile as a function of the offset a
  auto boundary_value = [&](double a) {
    ClosedForm1D t = cf;
    t.a = a;
    return t.value(1.0);
  };
  if (boundary_value(0.0) < g) {
    cf.contact = false;
    switch (cf.kind) {
      case ClosedFormKind::Classical: cf.amp = g - 0.5; break;
      case ClosedFormKind::CoshCoupled: cf.amp = (g + 1.0 / lambda) / std::cosh(std::sqrt(lambda)); break;
      case ClosedFormKind::CosCoupled: cf.amp = (g + 1.0 / lambda) / std::cos(std::sqrt(-lambda)); break;
    }
    return cf;
  }
  double lo = 0.0;
  if (cf.kind == ClosedFormKind::CosCoupled)
    lo = std::max(0.0, 1.0 - M_PI / std::sqrt(-lambda)); // keep the profile on its monotone branch
  cf.a = bisect([&](double a) { return boundary_value(a) - g; }, lo, 1.0);
  return cf;
}

/**
 * Radial solution in 2D of Delta u = chi{u>0} with contact disk B_rho:
 *   u(r) = (r^2 - rho^2)/4 - (rho^2/2) ln(r/rho) for r >= rho, 0 otherwise.
 */
struct RadialProfile
{
  double rho = 0.0;
  double R = 1.0;

  double value(double r) const
  {
    if (r <= rho)
      return 0.0;
    return (r * r - rho * rho) / 4.0 - 0.5 * rho * rho * std::log(r / rho);
  }
  double derivative(double r) const { return r <= rho ? 0.0 : 0.5 * r - 0.5 * rho * rho / r; }
  double second_derivative(double r) const { return r <= rho ? 0.0 : 0.5 + 0.5 * rho * rho / (r * r); }
  double laplacian(double r) const { return second_derivative(r) + derivative(r) / r; }

  double operator()(const Point& p) const { return value(std::hypot(p[0], p[1])); }
};

inline RadialProfile closed_form_radial(double rho, double R)
{
  require(rho > 0.0 && rho < R, ErrorKind::config, "radial profile needs 0 < rho < R");
  return RadialProfile{rho, R};
}

struct BruteForceResult
{
  ScalarField u;
  ScalarField v;
  double energy = 0.0;
  long cycles = 0;
};

/**
 * Projected coordinate descent on the discrete energy
 *   J_h = sum_edges (vol/2) ((du)^2 + (dv)^2) / h_a^2 + sum_interior vol (u + v + lambda u v).
 * Each nodal step minimizes the exact local quadratic (recovered from three
 * local energy evaluations) and clamps at zero. Cycles stop when the energy
 * decrease of a cycle drops below 1e-14 and no node moved more than 1e-13.
 */
inline BruteForceResult brute_force_minimize(const GridSpec& grid, const ScalarField& g1,
                                             const ScalarField& g2, double lambda,
                                             long max_cycles = 1000000)
{
  for (int a = 0; a < grid.dim(); ++a)
    require(grid.nodes(a) <= 33, ErrorKind::config, "brute force oracle is limited to 33 nodes per axis");
  require(lambda > -estimate_lambda1(grid), ErrorKind::admissibility,
          "brute force oracle needs lambda > -lambda1");

  BruteForceResult res{ScalarField(grid), ScalarField(grid), 0.0, 0};
  for (std::size_t k : grid.boundary_indices()) {
    res.u[k] = g1[k];
    res.v[k] = g2[k];
  }
  const double vol = grid.cell_volume();
  const std::size_t nx = static_cast<std::size_t>(grid.nodes(0));

  auto neighbours = [&](std::size_t k, auto&& visit) {
    visit(k - 1, grid.h(0));
    visit(k + 1, grid.h(0));
    if (grid.dim() == 2) {
      visit(k - nx, grid.h(1));
      visit(k + nx, grid.h(1));
    }
  };
  // local part of J_h depending on w[k], evaluated with w[k] = t
  auto local = [&](const ScalarField& w, const ScalarField& other, std::size_t k, double t) {
    double e = 0.0;
    neighbours(k, [&](std::size_t nb, double h) {
      double d = (w[nb] - t) / h;
      e += 0.5 * vol * d * d;
    });
    e += vol * (t + lambda * t * other[k]);
    return e;
  };
  auto energy = [&] {
    double e = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      auto [i, j] = grid.multi(k);
      if (i + 1 < grid.nodes(0)) {
        double du = (res.u[k + 1] - res.u[k]) / grid.h(0), dv = (res.v[k + 1] - res.v[k]) / grid.h(0);
        e += 0.5 * vol * (du * du + dv * dv);
      }
      if (grid.dim() == 2 && j + 1 < grid.nodes(1)) {
        double du = (res.u[k + nx] - res.u[k]) / grid.h(1), dv = (res.v[k + nx] - res.v[k]) / grid.h(1);
        e += 0.5 * vol * (du * du + dv * dv);
      }
      if (!grid.is_boundary(k))
        e += vol * (res.u[k] + res.v[k] + lambda * res.u[k] * res.v[k]);
    }
    return e;
  };
  auto relax = [&](ScalarField& w, const ScalarField& other, std::size_t k) {
    double e0 = local(w, other, k, 0.0);
    double ep = local(w, other, k, 1.0);
    double em = local(w, other, k, -1.0);
    double qa = 0.5 * (ep + em - 2.0 * e0);
    double qb = 0.5 * (ep - em);
    double t = std::max(0.0, -qb / (2.0 * qa));
    double moved = std::abs(t - w[k]);
    w[k] = t;
    return moved;
  };

  auto interior = grid.interior_indices();
  double e_prev = energy();
  for (res.cycles = 1; res.cycles <= max_cycles; ++res.cycles) {
    double moved = 0.0;
    for (std::size_t k : interior)
      moved = std::max(moved, relax(res.u, res.v, k));
    for (std::size_t k : interior)
      moved = std::max(moved, relax(res.v, res.u, k));
    double e = energy();
    bool done = e_prev - e < 1e-14 && moved < 1e-13;
    e_prev = e;
    if (done)
      break;
  }
  res.energy = e_prev;
  return res;
}

} // namespace fblab::oracle
