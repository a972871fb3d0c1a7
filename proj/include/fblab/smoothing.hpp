#pragma once

#include <algorithm>

namespace fblab {

// Cubic smoothstep regularization of the Heaviside function on [-eps, eps]
// together with its antiderivative. With t = (s + eps) / (2 eps):
//   chi(s) = 3t^2 - 2t^3,  Phi(s) = 2 eps (t^3 - t^4 / 2),
// so chi = 0 and Phi = 0 below -eps, chi = 1 and Phi = s above eps.

inline double smooth_heaviside(double s, double eps)
{
  double t = std::clamp((s + eps) / (2.0 * eps), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

/// d chi / ds; continuous, supported on (-eps, eps).
inline double smooth_heaviside_derivative(double s, double eps)
{
  double t = (s + eps) / (2.0 * eps);
  if (t <= 0.0 || t >= 1.0)
    return 0.0;
  return 6.0 * t * (1.0 - t) / (2.0 * eps);
}

inline double smooth_primitive(double s, double eps)
{
  if (s <= -eps)
    return 0.0;
  if (s >= eps)
    return s;
  double t = (s + eps) / (2.0 * eps);
  double t3 = t * t * t;
  return 2.0 * eps * (t3 - 0.5 * t3 * t);
}

} // namespace fblab
