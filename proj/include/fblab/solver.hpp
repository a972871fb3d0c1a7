#pragma once

#include "fblab/eigenvalue.hpp"
#include "fblab/error.hpp"
#include "fblab/free_boundary_set.hpp"
#include "fblab/grid.hpp"
#include "fblab/smoothing.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fblab {

struct SolverConfig
{
  double tol = 1e-10;
  long max_sweeps = 200000;
  double omega = 1.5;
  double picard_damping = 1.0;
  std::vector<double> eps_schedule{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  double positivity_kappa = 4.0;
  double nondeg_m = 2.0;
  int max_outer = 1000;
  int max_newton = 200;

  void validate() const
  {
    require(tol > 0.0, ErrorKind::config, "solver.tol must be positive");
    require(max_sweeps > 0, ErrorKind::config, "solver.max_sweeps must be positive");
    require(omega > 0.0 && omega < 2.0, ErrorKind::config, "solver.omega must lie in (0,2)");
    require(picard_damping > 0.0 && picard_damping <= 1.0, ErrorKind::config,
            "solver.picard_damping must lie in (0,1]");
    require(!eps_schedule.empty(), ErrorKind::config, "solver.eps_schedule must not be empty");
    for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
      require(eps_schedule[i] > 0.0, ErrorKind::config, "solver.eps_schedule must be positive");
      require(i == 0 || eps_schedule[i] < eps_schedule[i - 1], ErrorKind::config,
              "solver.eps_schedule must be strictly decreasing");
    }
    require(positivity_kappa > 0.0, ErrorKind::config, "solver.positivity_kappa must be positive");
    require(nondeg_m > 1.0, ErrorKind::config, "solver.nondeg_m must exceed 1");
    require(max_outer > 0 && max_newton > 0, ErrorKind::config,
            "iteration limits must be positive");
  }
};

/// Relaxation factor of optimal SOR for the model Laplacian on this grid.
inline double sor_omega_estimate(const GridSpec& g)
{
  double worst = 0.0;
  for (int a = 0; a < g.dim(); ++a)
    worst = std::max(worst, static_cast<double>(g.nodes(a) - 1));
  double s = std::sin(M_PI / worst);
  return 2.0 / (1.0 + s);
}

struct CouplingParams
{
  double lambda = 0.0;
  /// Filled by estimate_lambda1; non-positive means "not yet estimated".
  double lambda1_estimate = 0.0;
};

struct SolutionPair
{
  ScalarField u;
  ScalarField v;
  double lambda = 0.0;
  double residual_u = 0.0;
  double residual_v = 0.0;
  int outer_iters = 0;
  long inner_sweeps = 0;
  bool coupling_u_ok = true; ///< 1 + lambda v > 0 on Gamma(u)
  bool coupling_v_ok = true; ///< 1 + lambda u > 0 on Gamma(v)
  double lambda1 = 0.0;
  std::vector<std::string> warnings;
};

/// max over interior nodes of |min(u_i, coeff_i - (Delta_h u)_i)|.
inline double complementarity_residual(const ScalarField& u, const ScalarField& coeff)
{
  double r = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u.grid().is_boundary(k))
      continue;
    r = std::max(r, std::abs(std::min(u[k], coeff[k] - laplacian_at(u, k))));
  }
  return r;
}

struct ObstacleSolve
{
  ScalarField u;
  double residual = 0.0;
  long sweeps = 0;
};

namespace detail {

/// One projected SOR pass over interior nodes in the given direction.
inline void psor_pass(ScalarField& u, const ScalarField& coeff, double omega, bool forward)
{
  const GridSpec& g = u.grid();
  const int nx = g.nodes(0);
  const double ihx2 = 1.0 / (g.h(0) * g.h(0));
  if (g.dim() == 1) {
    const double diag = 2.0 * ihx2;
    auto update = [&](int i) {
      double gs = ((u[i - 1] + u[i + 1]) * ihx2 - coeff[i]) / diag;
      u[i] = std::max(0.0, u[i] + omega * (gs - u[i]));
    };
    if (forward)
      for (int i = 1; i < nx - 1; ++i)
        update(i);
    else
      for (int i = nx - 2; i >= 1; --i)
        update(i);
    return;
  }
  const int ny = g.nodes(1);
  const double ihy2 = 1.0 / (g.h(1) * g.h(1));
  const double diag = 2.0 * ihx2 + 2.0 * ihy2;
  const std::size_t s = static_cast<std::size_t>(nx);
  auto update = [&](std::size_t k) {
    double gs = ((u[k - 1] + u[k + 1]) * ihx2 + (u[k - s] + u[k + s]) * ihy2 - coeff[k]) / diag;
    u[k] = std::max(0.0, u[k] + omega * (gs - u[k]));
  };
  if (forward) {
    for (int j = 1; j < ny - 1; ++j)
      for (int i = 1; i < nx - 1; ++i)
        update(g.index(i, j));
  } else {
    for (int j = ny - 2; j >= 1; --j)
      for (int i = nx - 2; i >= 1; --i)
        update(g.index(i, j));
  }
}

inline ScalarField with_boundary(const ScalarField& interior_source, const ScalarField& g)
{
  ScalarField u = interior_source;
  for (std::size_t k : g.grid().boundary_indices())
    u[k] = g[k];
  return u;
}

} // namespace detail

/**
 * Projected symmetric SOR for the complementarity system
 *   u >= 0,  coeff - Delta_h u >= 0,  u (coeff - Delta_h u) = 0
 * with Dirichlet values g. Each sweep is a forward then a backward
 * lexicographic pass; the clamp max(0, .) follows every nodal update.
 * Every fourth sweep is plain projected Gauss-Seidel.
 * Converged when complementarity_residual <= tol (1 + |u|_inf). An initial
 * guess that already satisfies the tolerance is returned untouched.
 */
inline ObstacleSolve solve_scalar_obstacle_detailed(const ScalarField& coeff, const ScalarField& g,
                                                    const SolverConfig& cfg,
                                                    const ScalarField* initial = nullptr)
{
  const GridSpec& grid = coeff.grid();
  require(grid == g.grid(), ErrorKind::config, "coefficient and boundary data on different grids");
  for (std::size_t k = 0; k < coeff.size(); ++k)
    if (!grid.is_boundary(k) && coeff[k] < 0.0) {
      std::ostringstream os;
      os << "obstacle coefficient is negative (" << coeff[k] << ") at node " << k
         << "; the complementarity form requires coeff >= 0";
      fail(ErrorKind::admissibility, os.str());
    }

  ObstacleSolve out;
  if (initial) {
    require(initial->grid() == grid, ErrorKind::config, "initial guess on a different grid");
    out.u = detail::with_boundary(*initial, g);
    for (std::size_t k = 0; k < out.u.size(); ++k)
      out.u[k] = std::max(out.u[k], 0.0);
  } else {
    out.u = detail::with_boundary(ScalarField(grid), g);
  }

  constexpr int check_every = 4;
  out.residual = complementarity_residual(out.u, coeff);
  while (out.residual > cfg.tol * (1.0 + out.u.max_abs())) {
    if (out.sweeps >= cfg.max_sweeps) {
      std::ostringstream os;
      os << "projected SOR did not converge in " << cfg.max_sweeps
         << " sweeps (residual " << out.residual << ", tol " << cfg.tol << ")";
      fail(ErrorKind::numerical, os.str());
    }
    // the last sweep of a block is unrelaxed: with omega near 2 the rounding
    // floor of the relaxed iteration sits above tol on fine grids
    for (int s = 0; s < check_every; ++s) {
      const double w = s + 1 == check_every ? 1.0 : cfg.omega;
      detail::psor_pass(out.u, coeff, w, true);
      detail::psor_pass(out.u, coeff, w, false);
    }
    out.sweeps += check_every;
    out.residual = complementarity_residual(out.u, coeff);
  }
  return out;
}

inline ScalarField solve_scalar_obstacle(const ScalarField& coeff, const ScalarField& g,
                                         const SolverConfig& cfg)
{
  return solve_scalar_obstacle_detailed(coeff, g, cfg).u;
}

/// Throws unless lambda > -lambda1; fills the estimate when absent.
inline double check_admissible(const GridSpec& g, CouplingParams& params)
{
  if (params.lambda1_estimate <= 0.0)
    params.lambda1_estimate = estimate_lambda1(g);
  if (!(params.lambda > -params.lambda1_estimate)) {
    std::ostringstream os;
    os << std::setprecision(6) << "lambda = " << params.lambda
       << " is not admissible: existence requires lambda > -lambda1, and the discrete lambda1 "
          "estimate on this grid is "
       << params.lambda1_estimate;
    fail(ErrorKind::admissibility, os.str());
  }
  return params.lambda1_estimate;
}

namespace detail {

/**
 * Coefficient 1 + lambda * other for the obstacle solve of `self`. Negative
 * values are tolerated (clipped to 0) only where `self` is not positive;
 * inside the positivity set they are a coefficient-sign failure.
 */
inline ScalarField coupling_coefficient(const ScalarField& other, const ScalarField& self,
                                        double lambda, double threshold, const char* name)
{
  ScalarField coeff(other.grid());
  for (std::size_t k = 0; k < coeff.size(); ++k) {
    double c = 1.0 + lambda * other[k];
    if (c < 0.0) {
      if (self[k] > threshold && !other.grid().is_boundary(k)) {
        std::ostringstream os;
        os << "coefficient 1 + lambda*" << (name[0] == 'u' ? 'v' : 'u') << " = " << c
           << " < 0 inside the positivity set of " << name << " at node " << k;
        fail(ErrorKind::admissibility, os.str());
      }
      c = 0.0;
    }
    coeff[k] = c;
  }
  return coeff;
}

inline void check_coefficient_sign(const ScalarField& other, const ScalarField& self, double lambda,
                                   double threshold, const char* name)
{
  (void)coupling_coefficient(other, self, lambda, threshold, name);
}

/// 1 + lambda * other > 0 at every extracted free-boundary point of self.
inline bool coupling_assumption_holds(const ScalarField& self, const ScalarField& other,
                                      double lambda, double kappa)
{
  if (lambda >= 0.0)
    return true;
  FreeBoundarySet fb = extract_free_boundary(self, kappa);
  for (const auto& p : fb.points)
    if (1.0 + lambda * interpolate(other, p.x) <= 0.0)
      return false;
  return true;
}

inline void finish_pair(SolutionPair& sol, double kappa)
{
  const double h = sol.u.grid().h_max();
  const double thr = kappa * h * h;
  ScalarField cu = coupling_coefficient(sol.v, sol.u, sol.lambda, thr, "u");
  ScalarField cv = coupling_coefficient(sol.u, sol.v, sol.lambda, thr, "v");
  sol.residual_u = complementarity_residual(sol.u, cu);
  sol.residual_v = complementarity_residual(sol.v, cv);
  sol.coupling_u_ok = coupling_assumption_holds(sol.u, sol.v, sol.lambda, kappa);
  sol.coupling_v_ok = coupling_assumption_holds(sol.v, sol.u, sol.lambda, kappa);
}

inline std::vector<std::string> semi_trivial_warnings(const BoundaryData& b)
{
  std::vector<std::string> w;
  if (b.validate())
    w.emplace_back("one boundary component vanishes identically: the solution is semi-trivial");
  return w;
}

} // namespace detail

/**
 * Damped Picard iteration for
 *   Delta u = (1 + lambda v) chi{u>0},  Delta v = (1 + lambda u) chi{v>0}.
 * Each half step is a scalar obstacle solve with the other component frozen.
 * Stops when the max-norm change of both components is <= tol.
 */
inline SolutionPair solve_coupled(const BoundaryData& bdata, CouplingParams params,
                                  const SolverConfig& cfg,
                                  const SolutionPair* initial = nullptr)
{
  cfg.validate();
  const GridSpec& grid = bdata.g1.grid();
  SolutionPair sol;
  sol.warnings = detail::semi_trivial_warnings(bdata);
  sol.lambda1 = check_admissible(grid, params);
  sol.lambda = params.lambda;
  const double lambda = params.lambda;
  const double h = grid.h_max();
  const double thr = cfg.positivity_kappa * h * h;

  ScalarField u = initial ? detail::with_boundary(initial->u, bdata.g1)
                          : detail::with_boundary(ScalarField(grid), bdata.g1);
  ScalarField v = initial ? detail::with_boundary(initial->v, bdata.g2)
                          : detail::with_boundary(ScalarField(grid), bdata.g2);

  if (lambda == 0.0) {
    ScalarField one(grid, 1.0);
    auto su = solve_scalar_obstacle_detailed(one, bdata.g1, cfg, initial ? &u : nullptr);
    auto sv = solve_scalar_obstacle_detailed(one, bdata.g2, cfg, initial ? &v : nullptr);
    sol.u = std::move(su.u);
    sol.v = std::move(sv.u);
    sol.inner_sweeps = su.sweeps + sv.sweeps;
    sol.outer_iters = 1;
    detail::finish_pair(sol, cfg.positivity_kappa);
    return sol;
  }

  const double theta = cfg.picard_damping;
  for (int it = 1;; ++it) {
    if (it > cfg.max_outer) {
      std::ostringstream os;
      os << "Picard coupling did not converge in " << cfg.max_outer << " outer iterations";
      fail(ErrorKind::numerical, os.str());
    }
    ScalarField cu = detail::coupling_coefficient(v, u, lambda, thr, "u");
    auto su = solve_scalar_obstacle_detailed(cu, bdata.g1, cfg, &u);
    detail::check_coefficient_sign(v, su.u, lambda, thr, "u");
    ScalarField un = su.u;
    if (theta < 1.0)
      for (std::size_t k = 0; k < un.size(); ++k)
        un[k] = (1.0 - theta) * u[k] + theta * su.u[k];

    ScalarField cv = detail::coupling_coefficient(un, v, lambda, thr, "v");
    auto sv = solve_scalar_obstacle_detailed(cv, bdata.g2, cfg, &v);
    detail::check_coefficient_sign(un, sv.u, lambda, thr, "v");
    ScalarField vn = sv.u;
    if (theta < 1.0)
      for (std::size_t k = 0; k < vn.size(); ++k)
        vn[k] = (1.0 - theta) * v[k] + theta * sv.u[k];

    double change = std::max(max_abs_diff(un, u), max_abs_diff(vn, v));
    u = std::move(un);
    v = std::move(vn);
    sol.inner_sweeps += su.sweeps + sv.sweeps;
    sol.outer_iters = it;
    if (change <= cfg.tol)
      break;
  }
  sol.u = std::move(u);
  sol.v = std::move(v);
  detail::finish_pair(sol, cfg.positivity_kappa);
  return sol;
}

namespace detail {

struct RegularizedSystem
{
  const GridSpec& grid;
  const InteriorNumbering& num;
  double lambda;
  double eps;

  /// F = -Delta_h w + (1 + lambda Phi(other)) chi(w) on interior unknowns of (u, v).
  Eigen::VectorXd residual(const ScalarField& u, const ScalarField& v) const
  {
    const long n = static_cast<long>(num.size());
    Eigen::VectorXd f(2 * n);
    for (long r = 0; r < n; ++r) {
      std::size_t k = num.node_of[r];
      f[r] = -laplacian_at(u, k) +
             (1.0 + lambda * smooth_primitive(v[k], eps)) * smooth_heaviside(u[k], eps);
      f[n + r] = -laplacian_at(v, k) +
                 (1.0 + lambda * smooth_primitive(u[k], eps)) * smooth_heaviside(v[k], eps);
    }
    return f;
  }

  Eigen::SparseMatrix<double> jacobian(const ScalarField& u, const ScalarField& v) const
  {
    const long n = static_cast<long>(num.size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * 12);
    append_neg_laplacian(grid, num, 0, trip);
    append_neg_laplacian(grid, num, n, trip);
    for (long r = 0; r < n; ++r) {
      std::size_t k = num.node_of[r];
      double cu = smooth_heaviside(u[k], eps), cv = smooth_heaviside(v[k], eps);
      trip.emplace_back(r, r,
                        (1.0 + lambda * smooth_primitive(v[k], eps)) *
                          smooth_heaviside_derivative(u[k], eps));
      trip.emplace_back(n + r, n + r,
                        (1.0 + lambda * smooth_primitive(u[k], eps)) *
                          smooth_heaviside_derivative(v[k], eps));
      double off = lambda * cu * cv;
      if (off != 0.0) {
        trip.emplace_back(r, n + r, off);
        trip.emplace_back(n + r, r, off);
      }
    }
    Eigen::SparseMatrix<double> jac(2 * n, 2 * n);
    jac.setFromTriplets(trip.begin(), trip.end());
    return jac;
  }
};

} // namespace detail

/**
 * Damped Newton solve of the regularized system
 *   Delta_h u = (1 + lambda Phi_eps(v)) chi_eps(u),
 *   Delta_h v = (1 + lambda Phi_eps(u)) chi_eps(v),
 * with Dirichlet data g1, g2. The Jacobian is the (symmetric) Hessian of the
 * smoothed energy; steps are backtracked on the squared residual norm.
 * Fields are not clamped and may dip slightly below zero.
 */
inline SolutionPair solve_regularized(const BoundaryData& bdata, CouplingParams params, double eps,
                                      const SolverConfig& cfg,
                                      const SolutionPair* initial = nullptr)
{
  cfg.validate();
  require(eps > 0.0, ErrorKind::config, "regularization eps must be positive");
  const GridSpec& grid = bdata.g1.grid();
  SolutionPair sol;
  sol.warnings = detail::semi_trivial_warnings(bdata);
  sol.lambda1 = check_admissible(grid, params);
  sol.lambda = params.lambda;

  InteriorNumbering num(grid);
  const long n = static_cast<long>(num.size());
  detail::RegularizedSystem sys{grid, num, params.lambda, eps};

  ScalarField u = initial ? detail::with_boundary(initial->u, bdata.g1)
                          : detail::with_boundary(ScalarField(grid), bdata.g1);
  ScalarField v = initial ? detail::with_boundary(initial->v, bdata.g2)
                          : detail::with_boundary(ScalarField(grid), bdata.g2);

  auto scale = [&] { return 1.0 + std::max(u.max_abs(), v.max_abs()); };
  Eigen::VectorXd f = sys.residual(u, v);
  double merit = 0.5 * f.squaredNorm();

  int it = 0;
  while (f.lpNorm<Eigen::Infinity>() > cfg.tol * scale()) {
    if (++it > cfg.max_newton) {
      std::ostringstream os;
      os << "Newton iteration for the regularized system (eps = " << eps
         << ") did not converge; residual " << f.lpNorm<Eigen::Infinity>();
      fail(ErrorKind::numerical, os.str());
    }
    Eigen::SparseMatrix<double> jac = sys.jacobian(u, v);
    Eigen::VectorXd d;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(jac);
    if (ldlt.info() == Eigen::Success)
      d = -ldlt.solve(f);
    if (ldlt.info() != Eigen::Success || !d.allFinite()) {
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
      lu.analyzePattern(jac);
      lu.factorize(jac);
      require(lu.info() == Eigen::Success, ErrorKind::numerical,
              "Newton Jacobian of the regularized system is singular");
      d = -lu.solve(f);
    }

    double alpha = 1.0;
    ScalarField ut = u, vt = v;
    Eigen::VectorXd ft;
    double mt = 0.0;
    for (;;) {
      for (long r = 0; r < n; ++r) {
        std::size_t k = num.node_of[r];
        ut[k] = u[k] + alpha * d[r];
        vt[k] = v[k] + alpha * d[n + r];
      }
      ft = sys.residual(ut, vt);
      mt = 0.5 * ft.squaredNorm();
      if (mt <= (1.0 - 1e-4 * alpha) * merit || alpha < 1e-12)
        break;
      alpha *= 0.5;
    }
    if (alpha < 1e-12 && mt >= merit) {
      std::ostringstream os;
      os << "Newton line search stalled for the regularized system (eps = " << eps
         << "); residual " << f.lpNorm<Eigen::Infinity>();
      fail(ErrorKind::numerical, os.str());
    }
    u = std::move(ut);
    v = std::move(vt);
    f = std::move(ft);
    merit = mt;
  }
  sol.u = std::move(u);
  sol.v = std::move(v);
  sol.outer_iters = it;
  sol.residual_u = f.head(n).lpNorm<Eigen::Infinity>();
  sol.residual_v = f.tail(n).lpNorm<Eigen::Infinity>();
  return sol;
}

/**
 * Regularized solves along cfg.eps_schedule (each warm-started from the
 * previous stage), then a clamp to nonnegative values and a polishing
 * solve_coupled started from the clamped pair.
 */
inline SolutionPair continuation_solve(const BoundaryData& bdata, CouplingParams params,
                                       const SolverConfig& cfg)
{
  cfg.validate();
  check_admissible(bdata.g1.grid(), params);
  std::optional<SolutionPair> stage;
  for (double eps : cfg.eps_schedule)
    stage = solve_regularized(bdata, params, eps, cfg, stage ? &*stage : nullptr);
  for (std::size_t k = 0; k < stage->u.size(); ++k) {
    stage->u[k] = std::max(stage->u[k], 0.0);
    stage->v[k] = std::max(stage->v[k], 0.0);
  }
  return solve_coupled(bdata, params, cfg, &*stage);
}

/// Discrete H^1 seminorm (edge differences) of a - b.
inline double gradient_norm_diff(const ScalarField& a, const ScalarField& b)
{
  const GridSpec& g = a.grid();
  require(g == b.grid(), ErrorKind::config, "fields live on different grids");
  const double vol = g.cell_volume();
  const std::size_t nx = static_cast<std::size_t>(g.nodes(0));
  double s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    auto [i, j] = g.multi(k);
    if (i + 1 < g.nodes(0)) {
      double d = ((a[k + 1] - b[k + 1]) - (a[k] - b[k])) / g.h(0);
      s += d * d * vol;
    }
    if (g.dim() == 2 && j + 1 < g.nodes(1)) {
      double d = ((a[k + nx] - b[k + nx]) - (a[k] - b[k])) / g.h(1);
      s += d * d * vol;
    }
  }
  return std::sqrt(s);
}

struct ConvergenceEntry
{
  double lambda = 0.0;
  double linf_u = 0.0;     ///< |u_lambda - u_0|_inf
  double linf = 0.0;       ///< max over both components
  double grad_norm = 0.0;  ///< sqrt(|grad(u-u0)|^2 + |grad(v-v0)|^2)
};

struct ConvergenceReport
{
  std::vector<ConvergenceEntry> entries;
  double lambda1 = 0.0;
  /// Least-squares slope of log(linf) against log|lambda| over nonzero entries (NaN if < 2).
  double loglog_slope = std::nan("");
};

/// Solves at every lambda and measures the distance to the lambda = 0 solution.
inline ConvergenceReport sweep_lambda(const BoundaryData& bdata, const std::vector<double>& lambdas,
                                      const SolverConfig& cfg)
{
  cfg.validate();
  const GridSpec& grid = bdata.g1.grid();
  ConvergenceReport rep;
  rep.lambda1 = estimate_lambda1(grid);
  for (double l : lambdas) {
    CouplingParams p{l, rep.lambda1};
    check_admissible(grid, p);
  }
  SolutionPair base = solve_coupled(bdata, {0.0, rep.lambda1}, cfg);
  std::vector<double> lx, ly;
  for (double l : lambdas) {
    SolutionPair s = l == 0.0 ? base : solve_coupled(bdata, {l, rep.lambda1}, cfg);
    ConvergenceEntry e;
    e.lambda = l;
    e.linf_u = max_abs_diff(s.u, base.u);
    e.linf = std::max(e.linf_u, max_abs_diff(s.v, base.v));
    double gu = gradient_norm_diff(s.u, base.u), gv = gradient_norm_diff(s.v, base.v);
    e.grad_norm = std::sqrt(gu * gu + gv * gv);
    rep.entries.push_back(e);
    if (l != 0.0 && e.linf > 0.0) {
      lx.push_back(std::log(std::abs(l)));
      ly.push_back(std::log(e.linf));
    }
  }
  if (lx.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      mx += lx[i];
      my += ly[i];
    }
    mx /= lx.size();
    my /= ly.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (sxx > 0.0)
      rep.loglog_slope = sxy / sxx;
  }
  return rep;
}

} // namespace fblab
