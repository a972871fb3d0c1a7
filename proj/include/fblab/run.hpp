#pragma once

#include "fblab/config.hpp"
#include "fblab/eigenvalue.hpp"
#include "fblab/energy.hpp"
#include "fblab/error.hpp"
#include "fblab/freeboundary.hpp"
#include "fblab/oracle.hpp"
#include "fblab/solver.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fblab {

/// Reads a per-node table in the field CSV layout (header, then x[,y],value in node order).
inline ScalarField read_field_table(const GridSpec& g, const std::string& path)
{
  std::ifstream in(path);
  require(in.good(), ErrorKind::config, "cannot read boundary table '" + path + "'");
  std::string line;
  std::getline(in, line);
  std::vector<double> vals;
  for (int no = 2; std::getline(in, line); ++no) {
    if (detail::trim(line).empty())
      continue;
    auto cols = detail::split(line, ',');
    require(static_cast<int>(cols.size()) == g.dim() + 1, ErrorKind::config,
            path + ": line " + std::to_string(no) + ": expected " + std::to_string(g.dim() + 1) + " columns");
    vals.push_back(detail::parse_number(path, cols.back()));
  }
  require(vals.size() == g.size(), ErrorKind::config,
          path + ": expected " + std::to_string(g.size()) + " rows, found " + std::to_string(vals.size()));
  return ScalarField(g, std::move(vals));
}

inline ScalarField boundary_field(const BoundarySpec& b, const GridSpec& g)
{
  ScalarField out(g);
  std::optional<ScalarField> table;
  if (b.name == "table")
    table = read_field_table(g, b.path);
  for (std::size_t k : g.boundary_indices()) {
    Point x = g.coords(k);
    if (b.name == "constant")
      out[k] = b.param;
    else if (b.name == "classical-1d")
      out[k] = 0.125;
    else if (b.name == "cosh-1d")
      out[k] = (std::cosh(0.5 * std::sqrt(b.param)) - 1.0) / b.param;
    else if (b.name == "radial")
      out[k] = oracle::RadialProfile{b.param, 1.0}.value(norm(x, g.dim()));
    else if (table)
      out[k] = (*table)[k];
  }
  return out;
}

inline BoundaryData boundary_from_config(const RunConfig& c, const GridSpec& g)
{
  BoundaryData b{boundary_field(c.g1, g), boundary_field(c.g2, g)};
  b.validate();
  return b;
}

/// Manufactured u for analysis runs; the partner field is identically zero.
inline ScalarField manufactured_field(const std::string& preset, const GridSpec& g)
{
  const int n = g.dim();
  return ScalarField::sample(g, [&](const Point& x) {
    const double last = x[n - 1];
    if (preset == "half-space")
      return 0.5 * std::pow(std::max(last, 0.0), 2);
    if (preset == "polynomial")
      return 0.5 * x[0] * x[0];
    if (preset == "polynomial-perturbed")
      return 0.5 * x[0] * x[0] + 1e-2 * std::pow(norm(x, n), 3);
    if (preset == "radial")
      return oracle::RadialProfile{0.25, 1.0}.value(norm(x, n));
    if (preset == "split-linear")
      return std::max(x[0], 0.0);
    fail(ErrorKind::config, "field.preset: unknown manufactured field '" + preset + "'");
  });
}

namespace detail {

inline std::string format_point(const Point& p, int dim)
{
  std::ostringstream s;
  s << std::setprecision(17) << p[0];
  if (dim == 2)
    s << ' ' << p[1];
  return s.str();
}

class RunWriter
{
public:
  RunWriter(const RunConfig& c, std::filesystem::path dir)
    : dir_(std::move(dir))
  {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    require(!ec, ErrorKind::config, "output.dir: cannot create '" + dir_.string() + "'");
    report_ << std::setprecision(17);
    report_ << "command: " << c.command << '\n';
    report_ << "config_hash: " << std::hex << std::setw(16) << std::setfill('0') << c.hash << std::dec
            << std::setfill(' ') << '\n';
    for (const auto& k : known_keys())
      report_ << "config." << k.key << ": " << c.resolved.at(k.key) << '\n';
    report_ << "resolved.omega: " << c.solver.omega << '\n';
    report_ << "mode: sequential\n";
  }

  std::ostream& report() { return report_; }

  std::ofstream open(const std::string& name)
  {
    std::ofstream f(dir_ / name);
    require(f.good(), ErrorKind::config, "output.dir: cannot write '" + (dir_ / name).string() + "'");
    return f;
  }

  void flush()
  {
    auto f = open("report.txt");
    f << report_.str();
  }

private:
  std::filesystem::path dir_;
  std::ostringstream report_;
};

struct Fields
{
  ScalarField u, v;
  double lambda = 0.0;
};

inline void report_solution(std::ostream& os, const SolutionPair& s)
{
  os << "lambda: " << s.lambda << '\n';
  os << "lambda1_estimate: " << s.lambda1 << '\n';
  os << "residual_u: " << s.residual_u << '\n';
  os << "residual_v: " << s.residual_v << '\n';
  os << "outer_iters: " << s.outer_iters << '\n';
  os << "inner_sweeps: " << s.inner_sweeps << '\n';
  os << "coupling_assumption_u: " << (s.coupling_u_ok ? "ok" : "violated") << '\n';
  os << "coupling_assumption_v: " << (s.coupling_v_ok ? "ok" : "violated") << '\n';
  for (const auto& w : s.warnings)
    os << "warning: " << w << '\n';
}

inline SolutionPair solve_from_config(const RunConfig& c, const GridSpec& g)
{
  BoundaryData b = boundary_from_config(c, g);
  CouplingParams p{c.lambda, 0.0};
  return c.method == "continuation" ? continuation_solve(b, p, c.solver) : solve_coupled(b, p, c.solver);
}

inline Fields fields_from_config(const RunConfig& c, const GridSpec& g, RunWriter& w)
{
  if (c.field_source == "manufactured") {
    w.report() << "field: manufactured " << c.field_preset << '\n';
    return {manufactured_field(c.field_preset, g), ScalarField(g), c.lambda};
  }
  SolutionPair s = solve_from_config(c, g);
  report_solution(w.report(), s);
  return {s.u, s.v, s.lambda};
}

/// Analysis points: explicit ones, or evenly spaced over the extracted set
/// restricted to points whose largest analysis ball fits in the box.
inline std::vector<Point> analysis_points(const RunConfig& c, const FreeBoundarySet& fb, const GridSpec& g,
                                          double rmax, const ScalarField& self)
{
  if (c.points.auto_count == 0)
    return c.points.points;
  std::vector<Point> usable;
  for (const auto& p : fb.points)
    if (g.contains_ball(refine_free_boundary_point(self, p.x, c.analysis.kappa), rmax))
      usable.push_back(p.x);
  require(!usable.empty(), ErrorKind::geometry,
          "no free-boundary point admits the largest analysis radius inside the box");
  std::vector<Point> out;
  const std::size_t n = std::min<std::size_t>(usable.size(), static_cast<std::size_t>(c.points.auto_count));
  for (std::size_t k = 0; k < n; ++k)
    out.push_back(usable[k * usable.size() / n]);
  return out;
}

inline void run_solve(const RunConfig& c, const GridSpec& g, RunWriter& w)
{
  SolutionPair s = solve_from_config(c, g);
  report_solution(w.report(), s);
  auto fu = w.open("u.csv");
  write_field_csv(fu, s.u);
  auto fv = w.open("v.csv");
  write_field_csv(fv, s.v);
  FreeBoundarySet fb = extract_free_boundary(s.u, c.solver.positivity_kappa, Component::U);
  fb.append(extract_free_boundary(s.v, c.solver.positivity_kappa, Component::V));
  auto ff = w.open("free_boundary.csv");
  write_free_boundary_csv(ff, fb, g.dim());
  w.report() << "free_boundary_points: " << fb.size() << '\n';
}

inline void run_sweep(const RunConfig& c, const GridSpec& g, RunWriter& w)
{
  BoundaryData b = boundary_from_config(c, g);
  ConvergenceReport rep = sweep_lambda(b, c.lambdas, c.solver);
  auto f = w.open("convergence.csv");
  f << std::setprecision(17) << "lambda,linf_error,grad_error\n";
  for (const auto& e : rep.entries)
    f << e.lambda << ',' << e.linf << ',' << e.grad_norm << '\n';
  w.report() << "lambda1_estimate: " << rep.lambda1 << '\n';
  w.report() << "loglog_slope: " << rep.loglog_slope << '\n';
  bool decreasing = true;
  for (std::size_t i = 1; i < rep.entries.size(); ++i)
    decreasing = decreasing && rep.entries[i].linf < rep.entries[i - 1].linf;
  w.report() << "linf_strictly_decreasing: " << (decreasing ? "yes" : "no") << '\n';
}

inline void run_classify(const RunConfig& c, const GridSpec& g, RunWriter& w)
{
  Fields f = fields_from_config(c, g, w);
  const ScalarField& self = c.component == Component::U ? f.u : f.v;
  FreeBoundarySet fb = extract_free_boundary(self, c.analysis.kappa, c.component);
  auto ff = w.open("free_boundary.csv");
  write_free_boundary_csv(ff, fb, g.dim());
  w.report() << "free_boundary_points: " << fb.size() << '\n';
  std::vector<double> radii = resolve_radii(c.radii_tokens, g.h_max());
  auto pts = analysis_points(c, fb, g, radii.back(), self);
  int counts[3] = {0, 0, 0};
  for (std::size_t k = 0; k < pts.size(); ++k) {
    BlowupReport r = classify_point(f.u, f.v, f.lambda, pts[k], c.component, radii, c.analysis, &fb);
    ++counts[static_cast<int>(r.classification)];
    w.report() << "[point " << k << "]\n";
    write_blowup_report(w.report(), r, g.dim());
  }
  w.report() << "regular_count: " << counts[0] << '\n';
  w.report() << "singular_count: " << counts[1] << '\n';
  w.report() << "undetermined_count: " << counts[2] << '\n';
}

inline void run_audit(const RunConfig& c, const GridSpec& g, RunWriter& w)
{
  Fields f = fields_from_config(c, g, w);
  const ScalarField& self = c.component == Component::U ? f.u : f.v;
  const ScalarField& other = c.component == Component::U ? f.v : f.u;
  std::vector<double> radii = resolve_radii(c.radii_tokens, g.h_max());
  std::vector<Point> centers;
  if (c.points.auto_count == 0) {
    centers = c.points.points;
  } else {
    FreeBoundarySet fb = extract_free_boundary(self, c.analysis.kappa, c.component);
    for (const auto& p : analysis_points(c, fb, g, radii.back(), self))
      centers.push_back(refine_free_boundary_point(self, p, c.analysis.kappa));
  }
  std::size_t total = 0;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    EnergyReport rep = c.monneau_q
                         ? audit_monneau(self, other, f.lambda, *c.monneau_q, centers[k], radii, c.analysis.quad,
                                         c.analysis.kappa)
                         : audit_weiss(self, other, f.lambda, centers[k], radii, c.analysis.quad, c.analysis.kappa);
    std::ostringstream name;
    name << "energy_" << std::setw(3) << std::setfill('0') << k << ".csv";
    auto fe = w.open(name.str());
    write_energy_csv(fe, rep);
    w.report() << "center_" << k << ": " << format_point(centers[k], g.dim()) << '\n';
    w.report() << "center_" << k << "_on_free_boundary: " << (rep.center_on_free_boundary ? "yes" : "no") << '\n';
    w.report() << "center_" << k << "_weiss_violations: " << rep.violation_count(AuditKind::Weiss) << '\n';
    if (rep.has_monneau)
      w.report() << "center_" << k << "_monneau_violations: " << rep.violation_count(AuditKind::Monneau) << '\n';
    for (const auto& v : rep.violations)
      w.report() << "violation: center " << k << ' ' << (v.kind == AuditKind::Weiss ? "weiss" : "monneau") << " r "
                 << v.r_lo << " -> " << v.r_hi << " decrease " << v.decrease << '\n';
    total += rep.violations.size();
  }
  w.report() << "total_violations: " << total << '\n';
}

struct OracleRow
{
  std::string name;
  double value;
  double reference;
  double tolerance;
  bool pass;
};

/// Comparisons of the solver and energy code against the reference solutions.
inline std::vector<OracleRow> oracle_checks()
{
  std::vector<OracleRow> rows;
  auto add = [&](std::string name, double value, double ref, double tol, bool relative) {
    double err = std::abs(value - ref) / (relative ? std::abs(ref) : 1.0);
    rows.push_back({std::move(name), value, ref, tol, err <= tol});
  };
  auto interp_error = [](const ScalarField& u, auto&& exact) {
    double e = 0.0;
    const GridSpec& g = u.grid();
    for (std::size_t k = 0; k + 1 < g.size(); ++k) {
      double x = g.coords(k)[0], xm = x + 0.5 * g.h(0);
      e = std::max({e, std::abs(u[k] - exact(x)), std::abs(interpolate(u, {xm, 0.0}) - exact(xm))});
    }
    return e;
  };
  for (auto [lambda, n] : {std::pair{0.0, 257}, std::pair{1.0, 513}}) {
    GridSpec g = grid_1d(-1.0, 1.0, n);
    double gv = lambda == 0.0 ? 0.125 : (std::cosh(0.5 * std::sqrt(lambda)) - 1.0) / lambda;
    auto cf = oracle::closed_form_1d(lambda, gv);
    BoundaryData b = make_boundary_data(g, [&](const Point&) { return gv; }, [&](const Point&) { return gv; });
    SolverConfig cfg;
    cfg.omega = sor_omega_estimate(g);
    SolutionPair s = solve_coupled(b, {lambda, 0.0}, cfg);
    double h = g.h(0);
    std::ostringstream name;
    name << "closed_form_1d_lambda_" << lambda;
    add(name.str(), interp_error(s.u, [&](double x) { return cf.value(x); }), 0.0,
        (lambda == 0.0 ? 2.0 : 4.0) * h * h, false);
  }
  {
    GridSpec g = grid_1d(0.0, 1.0, 33);
    auto b = make_boundary_data(
      g, [](const Point& x) { return x[0] < 0.5 ? 0.02 : 0.03; }, [](const Point& x) { return x[0] < 0.5 ? 0.03 : 0.01; });
    for (double lambda : {0.0, 0.5, 1.0, -5.0}) {
      SolverConfig cfg;
      cfg.tol = 1e-12;
      SolutionPair s = solve_coupled(b, {lambda, 0.0}, cfg);
      auto bf = oracle::brute_force_minimize(g, b.g1, b.g2, lambda);
      std::ostringstream name;
      name << "brute_force_lambda_" << lambda;
      add(name.str(), std::max(max_abs_diff(s.u, bf.u), max_abs_diff(s.v, bf.v)), 0.0, 1e-6, false);
    }
  }
  {
    GridSpec g = grid_2d({-1.0, 1.0}, {-1.0, 1.0}, 257, 257);
    ScalarField zero(g);
    ScalarField hs = manufactured_field("half-space", g), poly = manufactured_field("polynomial", g);
    for (double r : {0.25, 0.5}) {
      add("weiss_half_space_r_" + std::to_string(r).substr(0, 4), weiss(hs, zero, 0.0, {0.0, 0.0}, r), M_PI / 32.0,
          5e-3, true);
      add("weiss_polynomial_r_" + std::to_string(r).substr(0, 4), weiss(poly, zero, 0.0, {0.0, 0.0}, r), M_PI / 16.0,
          5e-3, true);
    }
  }
  {
    GridSpec g = grid_2d({0.0, 1.0}, {0.0, 1.0}, 129, 129);
    add("lambda1_unit_square", estimate_lambda1(g), 2.0 * M_PI * M_PI, 2e-2, true);
  }
  {
    GridSpec g = grid_2d({-1.0, 1.0}, {-1.0, 1.0}, 129, 129);
    ScalarField wp = ScalarField::sample(g, [](const Point& x) { return std::max(x[0], 0.0); });
    ScalarField wm = ScalarField::sample(g, [](const Point& x) { return std::max(-x[0], 0.0); });
    for (double r : {0.2, 0.4, 0.8})
      add("acf_split_linear_r_" + std::to_string(r).substr(0, 3), acf(wp, wm, {0.0, 0.0}, r), M_PI * M_PI / 4.0, 1e-2,
          true);
  }
  return rows;
}

inline bool run_oracle_check(RunWriter& w)
{
  auto rows = oracle_checks();
  auto f = w.open("oracle_check.csv");
  f << std::setprecision(17) << "check,value,reference,tolerance,result\n";
  bool all = true;
  for (const auto& r : rows) {
    f << r.name << ',' << r.value << ',' << r.reference << ',' << r.tolerance << ',' << (r.pass ? "pass" : "fail")
      << '\n';
    w.report() << "oracle." << r.name << ": " << (r.pass ? "pass" : "fail") << '\n';
    all = all && r.pass;
  }
  w.report() << "oracle_all_pass: " << (all ? "yes" : "no") << '\n';
  return all;
}

} // namespace detail

/**
 * Runs one configured command, writing artifacts and report.txt into `out_dir`
 * (the configured output.dir when empty). Errors are reported with their
 * category and mapped to exit codes; nothing is rethrown.
 */
inline int run(const RunConfig& c, const std::string& out_dir = "", std::ostream& log = std::cerr)
{
  const std::filesystem::path dir = out_dir.empty() ? c.output_dir : out_dir;
  std::optional<detail::RunWriter> w;
  try {
    w.emplace(c, dir);
    GridSpec g = c.grid();
    int code = 0;
    if (c.command == "solve")
      detail::run_solve(c, g, *w);
    else if (c.command == "sweep-lambda")
      detail::run_sweep(c, g, *w);
    else if (c.command == "classify")
      detail::run_classify(c, g, *w);
    else if (c.command == "audit")
      detail::run_audit(c, g, *w);
    else if (!detail::run_oracle_check(*w))
      code = exit_code(ErrorKind::numerical);
    w->report() << "status: " << (code == 0 ? "ok" : "oracle mismatch") << '\n';
    w->flush();
    return code;
  } catch (const Error& e) {
    log << "fblab: " << to_string(e.kind()) << " error: " << e.what() << '\n';
    if (w) {
      w->report() << "status: error\n";
      w->report() << "error_kind: " << to_string(e.kind()) << '\n';
      w->report() << "error: " << e.what() << '\n';
      try {
        w->flush();
      } catch (const Error&) {
      }
    }
    return exit_code(e.kind());
  }
}

/// Parses and runs; config errors in the text itself also map to exit code 2.
inline int run_text(const std::string& text, const std::string& out_dir = "", std::ostream& log = std::cerr)
{
  try {
    return run(parse_config(text), out_dir, log);
  } catch (const Error& e) {
    log << "fblab: " << to_string(e.kind()) << " error: " << e.what() << '\n';
    return exit_code(e.kind());
  }
}

} // namespace fblab
