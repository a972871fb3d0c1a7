#pragma once

#include "fblab/error.hpp"
#include "fblab/grid.hpp"

#include <cmath>
#include <vector>

namespace fblab {

struct QuadratureRule
{
  int n_angular = 256; ///< sphere samples in 2D; 1D always uses the two endpoints
  int n_radial = 128;  ///< composite-trapezoid panels in the radius
  int n_s = 64;        ///< panels for the outer s-integrals of the correction terms

  void validate() const
  {
    require(n_angular >= 2 && n_radial >= 2 && n_s >= 2, ErrorKind::config,
            "quadrature counts must be at least 2");
  }
};

/// Unit directions with weights summing to |dB_1| (2 in 1D, 2 pi in 2D).
struct SphereRule
{
  int dim = 2;
  std::vector<Point> dirs;
  std::vector<double> weights;

  SphereRule(int dim_, int n_angular)
    : dim(dim_)
  {
    if (dim == 1) {
      dirs = {{1.0, 0.0}, {-1.0, 0.0}};
      weights = {1.0, 1.0};
      return;
    }
    dirs.reserve(n_angular);
    weights.assign(n_angular, 2.0 * M_PI / n_angular);
    for (int k = 0; k < n_angular; ++k) {
      double t = 2.0 * M_PI * (k + 0.5) / n_angular;
      dirs.push_back({std::cos(t), std::sin(t)});
    }
  }

  double measure() const { return dim == 1 ? 2.0 : 2.0 * M_PI; }
};

/// |dB_1| / (n (n + 2)) = integral of x_n^2 over the unit ball.
inline double alpha_n(int dim)
{
  const double area = dim == 1 ? 2.0 : 2.0 * M_PI;
  return area / (dim * (dim + 2));
}

/// Integral of f over the sphere dB_r(x0).
template<class F>
double sphere_integral(const SphereRule& rule, const Point& x0, double r, F&& f)
{
  double s = 0.0;
  for (std::size_t k = 0; k < rule.dirs.size(); ++k)
    s += rule.weights[k] * f(x0 + r * rule.dirs[k]);
  return s * std::pow(r, rule.dim - 1);
}

/**
 * Polar quadrature of f over B_r(x0): composite trapezoid in the radius with
 * n_radial panels, the sphere rule in angle, and radial weight rho^radial_power
 * (rho^(n-1) for plain volume integrals).
 */
template<class F>
double ball_integral(const SphereRule& rule, int n_radial, const Point& x0, double r, int radial_power,
                     F&& f)
{
  const double dr = r / n_radial;
  double total = 0.0;
  for (int j = 0; j <= n_radial; ++j) {
    const double rho = j * dr;
    const double w = (j == 0 || j == n_radial) ? 0.5 : 1.0;
    const double radial = radial_power == 0 ? 1.0 : std::pow(rho, radial_power);
    if (radial == 0.0)
      continue;
    double ring = 0.0;
    for (std::size_t k = 0; k < rule.dirs.size(); ++k)
      ring += rule.weights[k] * f(x0 + rho * rule.dirs[k]);
    total += w * radial * ring;
  }
  return total * dr;
}

} // namespace fblab
