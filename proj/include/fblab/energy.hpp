#pragma once

#include "fblab/error.hpp"
#include "fblab/grid.hpp"
#include "fblab/quadrature.hpp"
#include "fblab/smoothing.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <vector>

namespace fblab {

namespace detail {

/// Edge-midpoint Dirichlet energy (1/2) integral |grad w|^2.
inline double dirichlet_energy(const ScalarField& w)
{
  const GridSpec& g = w.grid();
  const double vol = g.cell_volume();
  const std::size_t nx = static_cast<std::size_t>(g.nodes(0));
  double e = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    auto [i, j] = g.multi(k);
    if (i + 1 < g.nodes(0)) {
      double d = (w[k + 1] - w[k]) / g.h(0);
      e += 0.5 * vol * d * d;
    }
    if (g.dim() == 2 && j + 1 < g.nodes(1)) {
      double d = (w[k + nx] - w[k]) / g.h(1);
      e += 0.5 * vol * d * d;
    }
  }
  return e;
}

/// Tensor trapezoid weight of node k over the box.
inline double trapezoid_weight(const GridSpec& g, std::size_t k)
{
  auto [i, j] = g.multi(k);
  double w = g.cell_volume();
  if (i == 0 || i == g.nodes(0) - 1)
    w *= 0.5;
  if (g.dim() == 2 && (j == 0 || j == g.nodes(1) - 1))
    w *= 0.5;
  return w;
}

inline void require_inside(const GridSpec& g, const Point& x0, double r)
{
  require(r > 0.0, ErrorKind::config, "radius must be positive");
  if (!g.contains_ball(x0, r)) {
    std::ostringstream os;
    os << "ball of radius " << r << " around (" << x0[0];
    if (g.dim() == 2)
      os << ", " << x0[1];
    os << ") leaves the grid box";
    fail(ErrorKind::geometry, os.str());
  }
}

} // namespace detail

/// J(u, v) = (1/2) int |grad u|^2 + |grad v|^2 + int (u + v + lambda u v).
inline double energy_J(const ScalarField& u, const ScalarField& v, double lambda)
{
  require(u.grid() == v.grid(), ErrorKind::config, "energy_J: fields on different grids");
  double e = detail::dirichlet_energy(u) + detail::dirichlet_energy(v);
  for (std::size_t k = 0; k < u.size(); ++k)
    e += detail::trapezoid_weight(u.grid(), k) * (u[k] + v[k] + lambda * u[k] * v[k]);
  return e;
}

/// Smoothed energy with Phi_eps in place of the identity in the lower-order terms.
inline double energy_Jeps(const ScalarField& u, const ScalarField& v, double lambda, double eps)
{
  require(u.grid() == v.grid(), ErrorKind::config, "energy_Jeps: fields on different grids");
  require(eps > 0.0, ErrorKind::config, "energy_Jeps: eps must be positive");
  double e = detail::dirichlet_energy(u) + detail::dirichlet_energy(v);
  for (std::size_t k = 0; k < u.size(); ++k) {
    double pu = smooth_primitive(u[k], eps), pv = smooth_primitive(v[k], eps);
    e += detail::trapezoid_weight(u.grid(), k) * (pu + pv + lambda * pu * pv);
  }
  return e;
}

/// Homogeneous quadratic y^T M y (M symmetric), evaluated at y = x - x0.
struct QuadraticForm
{
  std::array<std::array<double, 2>, 2> m{{{0.0, 0.0}, {0.0, 0.0}}};

  double operator()(const Point& y) const
  {
    return m[0][0] * y[0] * y[0] + 2.0 * m[0][1] * y[0] * y[1] + m[1][1] * y[1] * y[1];
  }
  bool is_psd(double tol = 1e-10) const
  {
    double tr = m[0][0] + m[1][1];
    double det = m[0][0] * m[1][1] - m[0][1] * m[0][1];
    double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    return 0.5 * tr - disc >= -tol;
  }
};

/**
 * Weiss-type energy and its correction integrals for one center x0.
 * Holds gradient samplers so that repeated radii reuse them.
 */
class WeissEvaluator
{
public:
  WeissEvaluator(const ScalarField& u, const ScalarField& v, double lambda, const Point& x0,
                 QuadratureRule quad = {})
    : u_(u)
    , v_(v)
    , lambda_(lambda)
    , x0_(x0)
    , quad_(quad)
    , sphere_(u.grid().dim(), quad.n_angular)
  {
    require(u.grid() == v.grid(), ErrorKind::config, "Weiss: fields on different grids");
    quad_.validate();
    require(u.grid().contains(x0), ErrorKind::geometry, "Weiss center outside the grid box");
  }

  int dim() const { return u_.dim(); }
  const Point& center() const { return x0_; }

  /// W(r) = r^-(n+2) int_{B_r} (|grad u|^2/2 + u + lambda v u) - r^-(n+3) int_{dB_r} u^2.
  double weiss(double r) const
  {
    detail::require_inside(u_.value.grid(), x0_, r);
    const int n = dim();
    double vol = ball_integral(sphere_, quad_.n_radial, x0_, r, n - 1, [&](const Point& x) {
      Point gu = u_.gradient(x);
      double uu = u_(x);
      return 0.5 * dot(gu, gu, n) + uu + lambda_ * interpolate(v_.value, x) * uu;
    });
    double surf = sphere_integral(sphere_, x0_, r, [&](const Point& x) {
      double uu = u_(x);
      return uu * uu;
    });
    return vol / std::pow(r, n + 2) - surf / std::pow(r, n + 3);
  }

  /// f1(s) = lambda int_{B_1} (u(s x + x0) / s^2) grad v(s x + x0) . x dx.
  double f1(double s) const
  {
    const int n = dim();
    return lambda_ * ball_integral(sphere_, quad_.n_radial, Point{0.0, 0.0}, 1.0, n - 1,
                                   [&](const Point& y) {
                                     Point x = x0_ + s * y;
                                     return u_(x) / (s * s) * dot(v_.gradient(x), y, n);
                                   });
  }

  /**
   * ftilde(s) = (2 lambda / s^(n+3)) int_{B_s} (v - v(x0)) (u + q(x - x0)) chi{u > thr},
   * evaluated on the unit ball after the substitution x = x0 + s y.
   */
  double ftilde(double s, const QuadraticForm& q, double threshold) const
  {
    const int n = dim();
    const double v0 = v_(x0_);
    double integral = ball_integral(sphere_, quad_.n_radial, Point{0.0, 0.0}, 1.0, n - 1,
                                    [&](const Point& y) {
                                      Point x = x0_ + s * y;
                                      double uu = u_(x);
                                      if (!(uu > threshold))
                                        return 0.0;
                                      return (v_(x) - v0) * (uu + q(s * y));
                                    });
    return 2.0 * lambda_ * integral / (s * s * s);
  }

  /// F1(r) = int_0^r f1; trapezoid on s_k = k r / n_s with f1(0+) taken as f1(s_1).
  double weiss_f1(double r) const
  {
    detail::require_inside(u_.value.grid(), x0_, r);
    if (lambda_ == 0.0)
      return 0.0;
    auto p = s_profile(r, [&](double s) { return f1(s); });
    return cumulative(p, r).back();
  }

  struct MonneauCorrections
  {
    double ftilde = 0.0; ///< Ftilde_1(r) = int_0^r ftilde
    double fbar = 0.0;   ///< Fbar_1(r) = 4 int_0^r F1(t)/t dt
  };

  MonneauCorrections monneau_corrections(double r, const QuadraticForm& q, double threshold) const
  {
    detail::require_inside(u_.value.grid(), x0_, r);
    MonneauCorrections out;
    if (lambda_ == 0.0)
      return out;
    auto pt = s_profile(r, [&](double s) { return ftilde(s, q, threshold); });
    out.ftilde = cumulative(pt, r).back();

    auto pf = s_profile(r, [&](double s) { return f1(s); });
    auto big_f = cumulative(pf, r);
    const double ds = r / quad_.n_s;
    // integrand F1(t)/t, with limit f1(0+) at t = 0
    double acc = 0.5 * pf[0];
    for (int k = 1; k <= quad_.n_s; ++k)
      acc += (k == quad_.n_s ? 0.5 : 1.0) * big_f[k] / (k * ds);
    out.fbar = 4.0 * acc * ds;
    return out;
  }

  /// M(r) = r^-(n+3) int_{dB_r(x0)} (u - q(x - x0))^2.
  double monneau(double r, const QuadraticForm& q) const
  {
    detail::require_inside(u_.value.grid(), x0_, r);
    double surf = sphere_integral(sphere_, x0_, r, [&](const Point& x) {
      double d = u_(x) - q(x - x0_);
      return d * d;
    });
    return surf / std::pow(r, dim() + 3);
  }

private:
  /// Values at s_k = k r / n_s for k = 0..n_s; entry 0 repeats entry 1.
  template<class F>
  std::vector<double> s_profile(double r, F&& f) const
  {
    std::vector<double> vals(quad_.n_s + 1);
    const double ds = r / quad_.n_s;
    for (int k = 1; k <= quad_.n_s; ++k)
      vals[k] = f(k * ds);
    vals[0] = vals[1];
    return vals;
  }

  std::vector<double> cumulative(const std::vector<double>& vals, double r) const
  {
    const double ds = r / quad_.n_s;
    std::vector<double> out(vals.size(), 0.0);
    for (std::size_t k = 1; k < vals.size(); ++k)
      out[k] = out[k - 1] + 0.5 * ds * (vals[k - 1] + vals[k]);
    return out;
  }

  FieldSampler u_;
  FieldSampler v_;
  double lambda_;
  Point x0_;
  QuadratureRule quad_;
  SphereRule sphere_;
};

inline double weiss(const ScalarField& u, const ScalarField& v, double lambda, const Point& x0,
                    double r, QuadratureRule quad = {})
{
  return WeissEvaluator(u, v, lambda, x0, quad).weiss(r);
}

inline double weiss_f1(const ScalarField& u, const ScalarField& v, double lambda, const Point& x0,
                       double r, QuadratureRule quad = {})
{
  return WeissEvaluator(u, v, lambda, x0, quad).weiss_f1(r);
}

inline double monneau(const ScalarField& u, const QuadraticForm& q, const Point& x0, double r,
                      QuadratureRule quad = {})
{
  require(q.is_psd(), ErrorKind::config, "Monneau polynomial must be positive semidefinite");
  ScalarField zero(u.grid());
  return WeissEvaluator(u, zero, 0.0, x0, quad).monneau(r, q);
}

inline WeissEvaluator::MonneauCorrections monneau_corrections(const ScalarField& u,
                                                              const ScalarField& v, double lambda,
                                                              const QuadraticForm& q,
                                                              const Point& x0, double r,
                                                              QuadratureRule quad = {},
                                                              double kappa = 4.0)
{
  const double h = u.grid().h_max();
  return WeissEvaluator(u, v, lambda, x0, quad).monneau_corrections(r, q, kappa * h * h);
}

enum class AuditKind
{
  Weiss,
  Monneau
};

struct MonotonicityViolation
{
  AuditKind kind = AuditKind::Weiss;
  double r_lo = 0.0;
  double r_hi = 0.0;
  double decrease = 0.0;
};

struct EnergyReport
{
  Point center{0.0, 0.0};
  std::vector<double> radii;
  std::vector<double> w_raw, f1, w_corrected;
  bool has_monneau = false;
  std::vector<double> m_raw, ftilde, fbar, m_corrected;
  std::vector<MonotonicityViolation> violations;
  bool center_on_free_boundary = true; ///< u(x0) <= kappa h^2

  std::size_t violation_count(AuditKind kind) const
  {
    std::size_t n = 0;
    for (const auto& v : violations)
      n += v.kind == kind;
    return n;
  }
};

/// Adjacent-pair tolerance for monotonicity audits.
inline double monotonicity_tolerance(double value) { return 1e-3 * (1.0 + std::abs(value)); }

namespace detail {

inline void validate_radii(const GridSpec& g, const Point& x0, const std::vector<double>& radii)
{
  require(!radii.empty(), ErrorKind::config, "audit needs at least one radius");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    require(radii[i] > 0.0, ErrorKind::config, "audit radii must be positive");
    require(i == 0 || radii[i] > radii[i - 1], ErrorKind::config,
            "audit radii must be strictly increasing");
  }
  require_inside(g, x0, radii.back());
}

inline void record_decreases(AuditKind kind, const std::vector<double>& radii,
                             const std::vector<double>& vals,
                             std::vector<MonotonicityViolation>& out)
{
  for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
    double drop = vals[i] - vals[i + 1];
    if (drop > monotonicity_tolerance(vals[i]))
      out.push_back({kind, radii[i], radii[i + 1], drop});
  }
}

} // namespace detail

/// Tabulates W, F1 and W - F1 and records every adjacent decrease beyond tolerance.
inline EnergyReport audit_weiss(const ScalarField& u, const ScalarField& v, double lambda,
                                const Point& x0, const std::vector<double>& radii,
                                QuadratureRule quad = {}, double kappa = 4.0)
{
  detail::validate_radii(u.grid(), x0, radii);
  WeissEvaluator ev(u, v, lambda, x0, quad);
  EnergyReport rep;
  rep.center = x0;
  rep.radii = radii;
  const double h = u.grid().h_max();
  rep.center_on_free_boundary = interpolate(u, x0) <= kappa * h * h;
  for (double r : radii) {
    double w = ev.weiss(r);
    double f = ev.weiss_f1(r);
    rep.w_raw.push_back(w);
    rep.f1.push_back(f);
    rep.w_corrected.push_back(w - f);
  }
  detail::record_decreases(AuditKind::Weiss, radii, rep.w_corrected, rep.violations);
  return rep;
}

/// Weiss audit plus M, Ftilde_1, Fbar_1 and M + Ftilde_1 - Fbar_1 for the polynomial q.
inline EnergyReport audit_monneau(const ScalarField& u, const ScalarField& v, double lambda,
                                  const QuadraticForm& q, const Point& x0,
                                  const std::vector<double>& radii, QuadratureRule quad = {},
                                  double kappa = 4.0)
{
  require(q.is_psd(), ErrorKind::config, "Monneau polynomial must be positive semidefinite");
  EnergyReport rep = audit_weiss(u, v, lambda, x0, radii, quad, kappa);
  WeissEvaluator ev(u, v, lambda, x0, quad);
  const double h = u.grid().h_max();
  rep.has_monneau = true;
  for (double r : radii) {
    double m = ev.monneau(r, q);
    auto c = ev.monneau_corrections(r, q, kappa * h * h);
    rep.m_raw.push_back(m);
    rep.ftilde.push_back(c.ftilde);
    rep.fbar.push_back(c.fbar);
    rep.m_corrected.push_back(m + c.ftilde - c.fbar);
  }
  detail::record_decreases(AuditKind::Monneau, radii, rep.m_corrected, rep.violations);
  return rep;
}

/// EnergyReport CSV: `r,W_raw,F1,W_corrected[,M_raw,Ftilde,Fbar,M_corrected]`.
inline void write_energy_csv(std::ostream& os, const EnergyReport& rep)
{
  os << "r,W_raw,F1,W_corrected";
  if (rep.has_monneau)
    os << ",M_raw,Ftilde,Fbar,M_corrected";
  os << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < rep.radii.size(); ++i) {
    os << rep.radii[i] << ',' << rep.w_raw[i] << ',' << rep.f1[i] << ',' << rep.w_corrected[i];
    if (rep.has_monneau)
      os << ',' << rep.m_raw[i] << ',' << rep.ftilde[i] << ',' << rep.fbar[i] << ','
         << rep.m_corrected[i];
    os << '\n';
  }
}

/**
 * Phi(r) = r^-4 prod_{+,-} int_{B_r(x0)} |grad w_pm|^2 / |x - x0|^(n-2).
 * Gradients are those of the multilinear interpolant, cell by cell.
 */
inline double acf(const ScalarField& wplus, const ScalarField& wminus, const Point& x0, double r,
                  QuadratureRule quad = {})
{
  require(wplus.grid() == wminus.grid(), ErrorKind::config, "ACF: fields on different grids");
  quad.validate();
  for (std::size_t k = 0; k < wplus.size(); ++k) {
    require(wplus[k] >= 0.0 && wminus[k] >= 0.0, ErrorKind::config,
            "ACF: both functions must be nonnegative");
    require(wplus[k] * wminus[k] <= 1e-12, ErrorKind::config,
            "ACF: the two functions must have disjoint supports");
  }
  detail::require_inside(wplus.grid(), x0, r);
  const int n = wplus.grid().dim();
  SphereRule sphere(n, quad.n_angular);
  // weight rho^(n-1) * rho^(2-n) = rho
  auto weighted = [&](const ScalarField& w) {
    return ball_integral(sphere, quad.n_radial, x0, r, 1, [&](const Point& x) {
      Point gr = interpolant_gradient(w, x);
      return dot(gr, gr, n);
    });
  };
  return weighted(wplus) * weighted(wminus) / std::pow(r, 4);
}

} // namespace fblab
