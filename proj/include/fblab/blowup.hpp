#pragma once

#include "fblab/energy.hpp"
#include "fblab/error.hpp"
#include "fblab/free_boundary_set.hpp"
#include "fblab/grid.hpp"
#include "fblab/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

namespace fblab {

/// Distance from the discrete free boundary within which a point counts as "on" it.
/// The kappa h^2 crossing sits about sqrt(kappa / c) h inside the positivity set.
inline double free_boundary_band(const GridSpec& g, double kappa)
{
  return (1.0 + 2.0 * std::sqrt(kappa)) * g.h_max();
}

inline double distance_to_set(const FreeBoundarySet& fb, const Point& x, int dim)
{
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : fb.points)
    best = std::min(best, norm(p.x - x, dim));
  return best;
}

/**
 * Moves a point of the kappa h^2 crossing towards the zero set of u. Near the
 * free boundary u grows quadratically, so sqrt(u) is close to linear along
 * -grad u; its root is extrapolated from two samples h apart. Points where u
 * already vanishes are returned unchanged.
 */
inline Point refine_free_boundary_point(const ScalarField& u, const Point& x0, double kappa)
{
  const GridSpec& g = u.grid();
  const int n = g.dim();
  const double h = g.h_max();
  const double a = std::sqrt(std::max(interpolate(u, x0), 0.0));
  if (a <= 0.0)
    return x0;
  FieldSampler s(u);
  Point grad = s.gradient(x0);
  double gn = norm(grad, n);
  if (gn <= 0.0)
    return x0;
  Point d = (-1.0 / gn) * grad;
  Point back = x0 - h * d;
  if (!g.contains(back))
    return x0;
  const double b = std::sqrt(std::max(interpolate(u, back), 0.0));
  if (b <= a)
    return x0;
  const double step = std::min(a * h / (b - a), free_boundary_band(g, kappa));
  Point x = x0 + step * d;
  return g.contains(x) ? x : x0;
}

/// Samples of a function on a uniform grid over [-1, 1]^n, masked to the unit ball.
struct RescaledField
{
  ScalarField field;
  std::vector<char> inside;

  int dim() const { return field.grid().dim(); }
};

template<class F>
RescaledField sample_reference_ball(int dim, int samples, F&& f)
{
  require(samples >= 3, ErrorKind::config, "reference ball needs at least 3 samples per axis");
  GridSpec g = dim == 1 ? grid_1d(-1.0, 1.0, samples)
                        : grid_2d({-1.0, 1.0}, {-1.0, 1.0}, samples, samples);
  RescaledField out{ScalarField(g), std::vector<char>(g.size(), 0)};
  for (std::size_t k = 0; k < g.size(); ++k) {
    Point x = g.coords(k);
    if (norm(x, dim) <= 1.0 + 1e-12) {
      out.inside[k] = 1;
      out.field[k] = f(x);
    }
  }
  return out;
}

/// Resolution used by rescale when samples == 0: one sample per grid spacing.
inline int matched_samples(const GridSpec& g, double r)
{
  int m = static_cast<int>(std::lround(r / g.h_max()));
  return std::clamp(2 * m + 1, 17, 129);
}

/// u_r(x) = (u(x0 + r x) - u(x0)) / r^2 on the reference ball.
inline RescaledField rescale(const ScalarField& u, const Point& x0, double r, int samples = 0)
{
  detail::require_inside(u.grid(), x0, r);
  if (samples <= 0)
    samples = matched_samples(u.grid(), r);
  const double u0 = interpolate(u, x0);
  return sample_reference_ball(u.grid().dim(), samples,
                               [&](const Point& x) { return (interpolate(u, x0 + r * x) - u0) / (r * r); });
}

/// Rescale of an already rescaled field (centered at the origin of the reference ball).
inline RescaledField rescale(const RescaledField& f, double r, int samples = 0)
{
  require(r > 0.0 && r <= 1.0, ErrorKind::geometry, "nested rescaling radius must lie in (0,1]");
  if (samples <= 0)
    samples = f.field.grid().nodes(0);
  const double f0 = interpolate(f.field, Point{0.0, 0.0});
  return sample_reference_ball(f.dim(), samples,
                               [&](const Point& x) { return (interpolate(f.field, r * x) - f0) / (r * r); });
}

enum class BlowupKind
{
  HalfSpace,
  Quadratic
};

inline const char* to_string(BlowupKind k) { return k == BlowupKind::HalfSpace ? "HalfSpace" : "Quadratic"; }

/// c((x.e)^+)^2 or c x^T A x with A symmetric, A >= 0, tr A = 1.
struct BlowupModel
{
  BlowupKind kind = BlowupKind::HalfSpace;
  Point e{0.0, 1.0};
  std::array<std::array<double, 2>, 2> a{{{0.0, 0.0}, {0.0, 0.0}}};
  double c = 0.5;
  double residual = 0.0;
  double halfspace_residual = 0.0;
  double quadratic_residual = 0.0;
  int dim = 2;

  double halfspace_value(const Point& x) const
  {
    double t = std::max(dot(x, e, dim), 0.0);
    return c * t * t;
  }
  double quadratic_value(const Point& x) const
  {
    if (dim == 1)
      return c * a[0][0] * x[0] * x[0];
    return c * (a[0][0] * x[0] * x[0] + 2.0 * a[0][1] * x[0] * x[1] + a[1][1] * x[1] * x[1]);
  }
  double operator()(const Point& x) const
  {
    return kind == BlowupKind::HalfSpace ? halfspace_value(x) : quadratic_value(x);
  }

  /// Eigenvalues of A in ascending order.
  std::vector<double> eigenvalues() const
  {
    if (dim == 1)
      return {a[0][0]};
    double tr = a[0][0] + a[1][1];
    double det = a[0][0] * a[1][1] - a[0][1] * a[0][1];
    double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    return {0.5 * tr - disc, 0.5 * tr + disc};
  }

  /// The polynomial c x^T A x as a QuadraticForm (for Monneau audits).
  QuadraticForm quadratic_form() const
  {
    QuadraticForm q;
    q.m[0][0] = c * a[0][0];
    q.m[0][1] = q.m[1][0] = dim == 2 ? c * a[0][1] : 0.0;
    q.m[1][1] = dim == 2 ? c * a[1][1] : 0.0;
    return q;
  }
};

namespace detail {

inline double relative_residual(const RescaledField& f, const auto& model)
{
  double num = 0.0, den = 0.0;
  const GridSpec& g = f.field.grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!f.inside[k])
      continue;
    double d = f.field[k] - model(g.coords(k));
    num += d * d;
    den += f.field[k] * f.field[k];
  }
  return std::sqrt(num / std::max(den, std::numeric_limits<double>::min()));
}

/// Golden-section minimization of a unimodal function on [a, b].
template<class F>
double golden_min(F&& f, double a, double b, double tol = 1e-12)
{
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

} // namespace detail

/**
 * Fits both blowup families to a field on the reference ball with the
 * amplitude c fixed: half-space c((x.e)^+)^2 by a coarse directional scan and
 * golden-section refinement, and c x^T A x by linear least squares followed
 * by projection onto {A >= 0, tr A = 1}. Returns the better fit, with both
 * residuals recorded.
 */
inline BlowupModel fit_blowup(const RescaledField& f, double c)
{
  const int n = f.dim();
  const GridSpec& g = f.field.grid();
  BlowupModel best;
  best.dim = n;
  best.c = c;

  // half-space family
  BlowupModel hs = best;
  hs.kind = BlowupKind::HalfSpace;
  if (n == 1) {
    BlowupModel p = hs, m = hs;
    p.e = {1.0, 0.0};
    m.e = {-1.0, 0.0};
    double rp = detail::relative_residual(f, [&](const Point& x) { return p.halfspace_value(x); });
    double rm = detail::relative_residual(f, [&](const Point& x) { return m.halfspace_value(x); });
    hs = rp <= rm ? p : m;
    hs.halfspace_residual = std::min(rp, rm);
  } else {
    auto res_at = [&](double t) {
      BlowupModel m = hs;
      m.e = {std::cos(t), std::sin(t)};
      return detail::relative_residual(f, [&](const Point& x) { return m.halfspace_value(x); });
    };
    constexpr int scan = 720;
    int kbest = 0;
    double rbest = std::numeric_limits<double>::infinity();
    for (int k = 0; k < scan; ++k) {
      double r = res_at(2.0 * M_PI * k / scan);
      if (r < rbest) {
        rbest = r;
        kbest = k;
      }
    }
    const double step = 2.0 * M_PI / scan;
    double t = detail::golden_min(res_at, 2.0 * M_PI * kbest / scan - step,
                                  2.0 * M_PI * kbest / scan + step, 1e-13);
    double rt = res_at(t);
    if (rt > rbest)
      t = 2.0 * M_PI * kbest / scan;
    hs.e = {std::cos(t), std::sin(t)};
    hs.halfspace_residual = std::min(rt, rbest);
  }

  // quadratic family
  BlowupModel qd = best;
  qd.kind = BlowupKind::Quadratic;
  if (n == 1) {
    qd.a[0][0] = 1.0;
  } else {
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d atb = Eigen::Vector3d::Zero();
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (!f.inside[k])
        continue;
      Point x = g.coords(k);
      Eigen::Vector3d row(c * x[0] * x[0], 2.0 * c * x[0] * x[1], c * x[1] * x[1]);
      ata += row * row.transpose();
      atb += row * f.field[k];
    }
    Eigen::Vector3d sol = ata.ldlt().solve(atb);
    Eigen::Matrix2d a;
    a << sol[0], sol[1], sol[1], sol[2];
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(a);
    Eigen::Vector2d ev = es.eigenvalues().cwiseMax(0.0);
    double tr = ev.sum();
    if (!(tr > 0.0))
      ev = Eigen::Vector2d::Constant(0.5);
    else
      ev /= tr;
    Eigen::Matrix2d ap = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    qd.a = {{{ap(0, 0), 0.5 * (ap(0, 1) + ap(1, 0))}, {0.5 * (ap(0, 1) + ap(1, 0)), ap(1, 1)}}};
  }
  qd.quadratic_residual =
    detail::relative_residual(f, [&](const Point& x) { return qd.quadratic_value(x); });

  BlowupModel out = hs.halfspace_residual <= qd.quadratic_residual ? hs : qd;
  out.e = hs.e;
  out.a = qd.a;
  out.halfspace_residual = hs.halfspace_residual;
  out.quadratic_residual = qd.quadratic_residual;
  out.residual = std::min(hs.halfspace_residual, qd.quadratic_residual);
  return out;
}

/// Directional width of a point set: min over directions of (max - min) projection.
struct WidthResult
{
  double width = 0.0;
  Point direction{1.0, 0.0};
};

inline WidthResult minimal_width(const std::vector<Point>& pts, int dim, int n_directions = 256)
{
  WidthResult out;
  if (pts.empty())
    return out;
  auto width_at = [&](const Point& e) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& p : pts) {
      double s = dot(p, e, dim);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    return hi - lo;
  };
  if (dim == 1) {
    out.width = width_at({1.0, 0.0});
    return out;
  }
  out.width = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_directions; ++k) {
    double t = M_PI * k / n_directions;
    Point e{std::cos(t), std::sin(t)};
    double w = width_at(e);
    if (w < out.width) {
      out.width = w;
      out.direction = e;
    }
  }
  return out;
}

/**
 * delta(rho) = min diam({u <= kappa h^2} intersected with B_rho(x0)) / rho,
 * with the complement represented by its grid nodes; 0 for an empty set.
 */
inline double thickness(const ScalarField& u, const Point& x0, double rho, double kappa)
{
  const GridSpec& g = u.grid();
  detail::require_inside(g, x0, rho);
  const double h = g.h_max();
  const double thr = kappa * h * h;
  std::vector<Point> pts;
  for (std::size_t k = 0; k < g.size(); ++k) {
    Point p = g.coords(k);
    if (u[k] <= thr && norm(p - x0, g.dim()) <= rho)
      pts.push_back(p);
  }
  return std::min(minimal_width(pts, g.dim()).width / rho, 2.0);
}

struct Flatness
{
  double sigma = 0.0;
  Point e{0.0, 1.0};
};

/**
 * sigma-flatness of the free boundary in B_r(x0): the unit e minimizing
 * max |(p - x0).e| over free-boundary points p in the ball, sigma = that max / r.
 */
inline Flatness flatness(const FreeBoundarySet& fb, const Point& x0, double r, int dim)
{
  std::vector<Point> rel;
  for (const auto& p : fb.points)
    if (norm(p.x - x0, dim) <= r)
      rel.push_back(p.x - x0);
  require(rel.size() >= 2, ErrorKind::geometry, "flatness needs at least two free-boundary points in the ball");
  auto slab = [&](double t) {
    Point e{std::cos(t), std::sin(t)};
    double m = 0.0;
    for (const auto& p : rel)
      m = std::max(m, std::abs(dot(p, e, dim)));
    return m;
  };
  Flatness out;
  if (dim == 1) {
    out.e = {1.0, 0.0};
    double m = 0.0;
    for (const auto& p : rel)
      m = std::max(m, std::abs(p[0]));
    out.sigma = m / r;
    return out;
  }
  constexpr int scan = 720;
  double tbest = 0.0, mbest = std::numeric_limits<double>::infinity();
  for (int k = 0; k < scan; ++k) {
    double t = M_PI * k / scan;
    double m = slab(t);
    if (m < mbest) {
      mbest = m;
      tbest = t;
    }
  }
  // principal-component normal as a second candidate
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& p : rel) {
    sxx += p[0] * p[0];
    sxy += p[0] * p[1];
    syy += p[1] * p[1];
  }
  double tpca = 0.5 * std::atan2(2.0 * sxy, sxx - syy) + 0.5 * M_PI;
  if (slab(tpca) < mbest) {
    mbest = slab(tpca);
    tbest = tpca;
  }
  const double step = M_PI / scan;
  double tg = detail::golden_min(slab, tbest - step, tbest + step, 1e-12);
  if (slab(tg) < mbest) {
    mbest = slab(tg);
    tbest = tg;
  }
  out.e = {std::cos(tbest), std::sin(tbest)};
  out.sigma = mbest / r;
  return out;
}

namespace detail {

inline void require_near_positive_or_boundary(const ScalarField& u, const Point& x0, double kappa)
{
  const double h = u.grid().h_max();
  if (interpolate(u, x0) > kappa * h * h)
    return;
  FreeBoundarySet fb = extract_free_boundary(u, kappa);
  require(!fb.empty() && distance_to_set(fb, x0, u.grid().dim()) <= free_boundary_band(u.grid(), kappa),
          ErrorKind::config, "point is neither in the positivity set nor on its free boundary");
}

} // namespace detail

/// sup_{dB_r(x0)} u >= u(x0) + r^2 / (2 m n) for each radius (angular sampling).
inline std::vector<bool> nondegeneracy_check(const ScalarField& u, const Point& x0,
                                             const std::vector<double>& radii, double m,
                                             double kappa = 4.0, int n_angular = 256)
{
  require(m > 1.0, ErrorKind::config, "nondegeneracy constant m must exceed 1");
  detail::require_near_positive_or_boundary(u, x0, kappa);
  const int n = u.grid().dim();
  SphereRule sphere(n, n_angular);
  const double u0 = interpolate(u, x0);
  std::vector<bool> out;
  for (double r : radii) {
    detail::require_inside(u.grid(), x0, r);
    double sup = -std::numeric_limits<double>::infinity();
    for (const auto& d : sphere.dirs)
      sup = std::max(sup, interpolate(u, x0 + r * d));
    out.push_back(sup >= u0 + r * r / (2.0 * m * n));
  }
  return out;
}

/// Gradient form: sup_{B_r(x0)} |grad u| >= r / (m n), sampled on four concentric spheres.
inline std::vector<bool> gradient_nondegeneracy_check(const ScalarField& u, const Point& x0,
                                                      const std::vector<double>& radii, double m,
                                                      double kappa = 4.0, int n_angular = 256)
{
  require(m > 1.0, ErrorKind::config, "nondegeneracy constant m must exceed 1");
  detail::require_near_positive_or_boundary(u, x0, kappa);
  const int n = u.grid().dim();
  SphereRule sphere(n, n_angular);
  FieldSampler s(u);
  std::vector<bool> out;
  for (double r : radii) {
    detail::require_inside(u.grid(), x0, r);
    double sup = 0.0;
    for (double frac : {0.25, 0.5, 0.75, 1.0})
      for (const auto& d : sphere.dirs)
        sup = std::max(sup, norm(s.gradient(x0 + frac * r * d), n));
    out.push_back(sup >= r / (m * n));
  }
  return out;
}

/// Fraction of grid nodes in B_r(x0) that are masked positive.
inline double positivity_density(const ScalarField& u, const Point& x0, double r, double kappa)
{
  const GridSpec& g = u.grid();
  detail::require_inside(g, x0, r);
  auto mask = positivity_mask(u, kappa);
  std::size_t total = 0, pos = 0;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (norm(g.coords(k) - x0, g.dim()) <= r) {
      ++total;
      pos += mask[k] != 0;
    }
  return total == 0 ? 0.0 : static_cast<double>(pos) / total;
}

enum class PointClass
{
  Regular,
  Singular,
  Undetermined
};

inline const char* to_string(PointClass c)
{
  switch (c) {
    case PointClass::Regular: return "Regular";
    case PointClass::Singular: return "Singular";
    case PointClass::Undetermined: return "Undetermined";
  }
  return "Undetermined";
}

struct ClassifyConfig
{
  double kappa = 4.0;             ///< positivity threshold kappa h^2
  double contact_kappa = 1e-2;    ///< threshold for the contact set in thickness
  double reliable_radius_h = 8.0; ///< smallest reliable radius in units of h
  double energy_gap = 0.1;        ///< required relative separation from the midpoint
  double thin_threshold = 0.05;
  double thick_threshold = 0.1;
  double stratum_tol = 1e-3;
  int rescale_samples = 0;        ///< 0: one sample per grid spacing
  QuadratureRule quad{};
};

struct BlowupReport
{
  Point input{0.0, 0.0};
  Point center{0.0, 0.0}; ///< refined free-boundary point actually analysed
  Component component = Component::U;
  std::vector<double> radii;
  std::vector<double> weiss_values; ///< W - F1 per radius
  std::vector<double> thickness_profile;
  double reliable_radius = 0.0;
  double w_star = 0.0;
  double amplitude = 0.5;
  double e_half = 0.0;
  double e_poly = 0.0;
  PointClass energy_vote = PointClass::Undetermined;
  PointClass classification = PointClass::Undetermined;
  BlowupModel model;
  double model_drift = 0.0; ///< change of the fitted model between the two smallest reliable radii
  std::optional<int> stratum_dim;
  std::string note;
};

/**
 * Regular/singular classification of a free-boundary point from the Weiss
 * energy at the smallest reliable radius: it is compared with the two
 * admissible blowup energies c^2 alpha_n / 2 (half-space) and c^2 alpha_n
 * (polynomial), c = (1 + lambda other(x0)) / 2. The energy label is kept only
 * if the thickness of the contact set and the fitted blowup family agree.
 */
inline BlowupReport classify_point(const ScalarField& u, const ScalarField& v, double lambda,
                                   const Point& x0, Component component,
                                   const std::vector<double>& radii, const ClassifyConfig& cfg = {},
                                   const FreeBoundarySet* extracted = nullptr)
{
  const ScalarField& self = component == Component::U ? u : v;
  const ScalarField& other = component == Component::U ? v : u;
  const GridSpec& g = self.grid();
  const int n = g.dim();
  const double h = g.h_max();

  std::optional<FreeBoundarySet> own;
  if (!extracted) {
    own = extract_free_boundary(self, cfg.kappa, component);
    extracted = &*own;
  }
  require(!extracted->empty() && distance_to_set(*extracted, x0, n) <= free_boundary_band(g, cfg.kappa),
          ErrorKind::config, "classify_point: the point is not near the discrete free boundary");

  BlowupReport rep;
  rep.input = x0;
  rep.component = component;
  rep.center = refine_free_boundary_point(self, x0, cfg.kappa);
  detail::validate_radii(g, rep.center, radii);
  rep.radii = radii;

  auto reliable = std::find_if(radii.begin(), radii.end(),
                               [&](double r) { return r >= cfg.reliable_radius_h * h * (1.0 - 1e-9); });
  require(reliable != radii.end(), ErrorKind::config,
          "classify_point: no radius at or above the smallest reliable radius");
  const std::size_t istar = static_cast<std::size_t>(reliable - radii.begin());
  rep.reliable_radius = radii[istar];

  EnergyReport er = component == Component::U
                      ? audit_weiss(u, v, lambda, rep.center, radii, cfg.quad, cfg.kappa)
                      : audit_weiss(v, u, lambda, rep.center, radii, cfg.quad, cfg.kappa);
  rep.weiss_values = er.w_corrected;
  for (double r : radii)
    rep.thickness_profile.push_back(thickness(self, rep.center, r, cfg.contact_kappa));

  rep.amplitude = 0.5 * (1.0 + lambda * interpolate(other, rep.center));
  const double alpha = alpha_n(n);
  rep.e_half = rep.amplitude * rep.amplitude * alpha / 2.0;
  rep.e_poly = rep.amplitude * rep.amplitude * alpha;
  rep.w_star = rep.weiss_values[istar];

  const double dh = std::abs(rep.w_star - rep.e_half), dp = std::abs(rep.w_star - rep.e_poly);
  const double gap = std::abs(dh - dp) / (rep.e_poly - rep.e_half);
  if (gap > cfg.energy_gap)
    rep.energy_vote = dh < dp ? PointClass::Regular : PointClass::Singular;

  const double delta = rep.thickness_profile[istar];
  const bool thin = delta <= cfg.thin_threshold;
  const bool thick = delta >= cfg.thick_threshold;

  rep.model = fit_blowup(rescale(self, rep.center, rep.reliable_radius, cfg.rescale_samples), rep.amplitude);
  if (istar + 1 < radii.size()) {
    BlowupModel next = fit_blowup(rescale(self, rep.center, radii[istar + 1], cfg.rescale_samples), rep.amplitude);
    if (next.kind != rep.model.kind)
      rep.model_drift = 1.0;
    else if (rep.model.kind == BlowupKind::HalfSpace)
      rep.model_drift = norm(next.e - rep.model.e, n);
    else
      rep.model_drift = std::abs(next.a[0][0] - rep.model.a[0][0]) + 2.0 * std::abs(next.a[0][1] - rep.model.a[0][1]) +
                        std::abs(next.a[1][1] - rep.model.a[1][1]);
  }

  rep.classification = rep.energy_vote;
  std::ostringstream note;
  if (rep.energy_vote == PointClass::Undetermined)
    note << "Weiss energy within the ambiguity gap; ";
  if (rep.energy_vote == PointClass::Regular && (thin || rep.model.kind == BlowupKind::Quadratic)) {
    rep.classification = PointClass::Undetermined;
    note << (thin ? "thin contact set " : "") << (rep.model.kind == BlowupKind::Quadratic ? "polynomial fit " : "")
         << "contradicts the regular energy level; ";
  }
  if (rep.energy_vote == PointClass::Singular && (thick || rep.model.kind == BlowupKind::HalfSpace)) {
    rep.classification = PointClass::Undetermined;
    note << (thick ? "thick contact set " : "") << (rep.model.kind == BlowupKind::HalfSpace ? "half-space fit " : "")
         << "contradicts the singular energy level; ";
  }
  rep.note = note.str();

  if (rep.classification == PointClass::Singular) {
    int d = 0;
    for (double ev : rep.model.eigenvalues())
      d += ev < cfg.stratum_tol;
    rep.stratum_dim = d;
  }
  return rep;
}

/// Structured `key: value` block for one analysed point.
inline void write_blowup_report(std::ostream& os, const BlowupReport& r, int dim)
{
  auto pt = [&](const Point& p) {
    std::ostringstream s;
    s << std::setprecision(17) << p[0];
    if (dim == 2)
      s << ' ' << p[1];
    return s.str();
  };
  os << std::setprecision(17);
  os << "point: " << pt(r.input) << '\n';
  os << "center: " << pt(r.center) << '\n';
  os << "component: " << to_string(r.component) << '\n';
  os << "reliable_radius: " << r.reliable_radius << '\n';
  os << "amplitude: " << r.amplitude << '\n';
  os << "weiss_star: " << r.w_star << '\n';
  os << "energy_half_space: " << r.e_half << '\n';
  os << "energy_polynomial: " << r.e_poly << '\n';
  os << "energy_vote: " << to_string(r.energy_vote) << '\n';
  os << "model: " << to_string(r.model.kind) << '\n';
  os << "model_residual_half_space: " << r.model.halfspace_residual << '\n';
  os << "model_residual_quadratic: " << r.model.quadratic_residual << '\n';
  os << "model_drift: " << r.model_drift << '\n';
  os << "thickness_at_reliable_radius: "
     << r.thickness_profile[static_cast<std::size_t>(
          std::find(r.radii.begin(), r.radii.end(), r.reliable_radius) - r.radii.begin())]
     << '\n';
  os << "weiss_profile:";
  for (double w : r.weiss_values)
    os << ' ' << w;
  os << '\n';
  os << "classification: " << to_string(r.classification) << '\n';
  os << "stratum_dim: " << (r.stratum_dim ? std::to_string(*r.stratum_dim) : std::string("none")) << '\n';
  if (!r.note.empty())
    os << "note: " << r.note << '\n';
}

} // namespace fblab
