#pragma once

// Line-oriented run configuration:
//   # comment
//   grid.dim = 2
//   boundary.g1 = radial 0.25
// Every key has a default; unknown keys are rejected.

#include "fblab/error.hpp"
#include "fblab/grid.hpp"
#include "fblab/quadrature.hpp"
#include "fblab/solver.hpp"
#include "fblab/blowup.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fblab {

namespace detail {

inline std::string trim(const std::string& s)
{
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep)
{
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty())
      out.push_back(cur);
  }
  return out;
}

inline std::vector<std::string> words(const std::string& s)
{
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string w; is >> w;)
    out.push_back(w);
  return out;
}

struct KeySpec
{
  const char* key;
  const char* fallback;
};

// default values, in report order
inline const std::vector<KeySpec>& known_keys()
{
  static const std::vector<KeySpec> keys = {
    {"command", "solve"},
    {"grid.dim", "2"},
    {"grid.x", "0, 1"},
    {"grid.y", "0, 1"},
    {"grid.nodes", "129"},
    {"boundary.g1", "zero"},
    {"boundary.g2", "zero"},
    {"lambda", "0"},
    {"lambdas", "0.2, 0.1, 0.05, 0.025"},
    {"solver.method", "picard"},
    {"solver.tol", "1e-10"},
    {"solver.max_sweeps", "200000"},
    {"solver.omega", "1.5"},
    {"solver.picard_damping", "1"},
    {"solver.eps_schedule", "1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6"},
    {"solver.positivity_kappa", "4"},
    {"solver.nondeg_m", "2"},
    {"solver.max_outer", "1000"},
    {"solver.max_newton", "200"},
    {"field.source", "solve"},
    {"field.preset", "none"},
    {"analysis.component", "u"},
    {"analysis.radii", "8h, 12h, 16h"},
    {"analysis.kappa", "4"},
    {"analysis.contact_kappa", "1e-2"},
    {"analysis.n_angular", "256"},
    {"analysis.n_radial", "128"},
    {"analysis.n_s", "64"},
    {"analysis.points", "auto 16"},
    {"analysis.monneau", "none"},
    {"output.dir", "out"},
  };
  return keys;
}

} // namespace detail

/// Boundary preset: zero | constant c | classical-1d | cosh-1d lambda | radial rho | table path
struct BoundarySpec
{
  std::string name = "zero";
  double param = 0.0;
  std::string path;
};

/// Points to analyse: either "auto N" (evenly spaced along the extracted free boundary) or explicit.
struct PointSpec
{
  int auto_count = 0;
  std::vector<Point> points;
};

struct RunConfig
{
  std::string command = "solve";
  int dim = 2;
  std::vector<Interval> extents;
  std::vector<int> nodes;
  BoundarySpec g1, g2;
  double lambda = 0.0;
  std::vector<double> lambdas;
  std::string method = "picard";
  bool omega_auto = false;
  SolverConfig solver;
  std::string field_source = "solve";
  std::string field_preset = "none";
  Component component = Component::U;
  std::vector<std::string> radii_tokens;
  ClassifyConfig analysis;
  PointSpec points;
  std::optional<QuadraticForm> monneau_q;
  std::string output_dir = "out";

  std::map<std::string, std::string> resolved; ///< every key with its effective text value
  std::uint64_t hash = 0;

  GridSpec grid() const { return build_grid(dim, extents, nodes); }
};

/// 64-bit FNV-1a of the raw configuration text.
inline std::uint64_t config_hash(const std::string& text)
{
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace detail {

inline double parse_number(const std::string& key, const std::string& s)
{
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (trim(s.substr(used)).empty() && std::isfinite(v))
      return v;
  } catch (const std::exception&) {
  }
  fail(ErrorKind::config, key + ": expected a number, got '" + s + "'");
}

inline long parse_integer(const std::string& key, const std::string& s)
{
  double v = parse_number(key, s);
  require(v == std::floor(v), ErrorKind::config, key + ": expected an integer, got '" + s + "'");
  return static_cast<long>(v);
}

inline std::vector<double> parse_list(const std::string& key, const std::string& s)
{
  std::vector<double> out;
  for (const auto& t : split(s, ','))
    out.push_back(parse_number(key, t));
  return out;
}

inline BoundarySpec parse_boundary(const std::string& key, const std::string& s)
{
  auto w = words(s);
  require(!w.empty(), ErrorKind::config, key + ": empty boundary preset");
  BoundarySpec b;
  b.name = w[0];
  auto want = [&](std::size_t n) {
    require(w.size() == n, ErrorKind::config, key + ": preset '" + b.name + "' takes " + std::to_string(n - 1) +
                                                 " argument(s)");
  };
  if (b.name == "zero" || b.name == "classical-1d") {
    want(1);
  } else if (b.name == "constant" || b.name == "cosh-1d" || b.name == "radial") {
    want(2);
    b.param = parse_number(key, w[1]);
  } else if (b.name == "table") {
    want(2);
    b.path = w[1];
  } else {
    fail(ErrorKind::config, key + ": unknown boundary preset '" + b.name + "'");
  }
  if (b.name == "constant")
    require(b.param >= 0.0, ErrorKind::config, key + ": boundary values must be nonnegative");
  if (b.name == "cosh-1d")
    require(b.param > 0.0, ErrorKind::config, key + ": cosh-1d needs lambda > 0");
  if (b.name == "radial")
    require(b.param > 0.0, ErrorKind::config, key + ": radial needs rho > 0");
  return b;
}

inline PointSpec parse_points(const std::string& key, const std::string& s, int dim)
{
  PointSpec p;
  auto w = words(s);
  if (!w.empty() && w[0] == "auto") {
    require(w.size() == 2, ErrorKind::config, key + ": expected 'auto N'");
    p.auto_count = static_cast<int>(parse_integer(key, w[1]));
    require(p.auto_count > 0, ErrorKind::config, key + ": auto count must be positive");
    return p;
  }
  for (const auto& item : split(s, ';')) {
    auto c = words(item);
    require(static_cast<int>(c.size()) == dim, ErrorKind::config,
            key + ": each point needs " + std::to_string(dim) + " coordinate(s)");
    Point x{0.0, 0.0};
    for (int a = 0; a < dim; ++a)
      x[a] = parse_number(key, c[a]);
    p.points.push_back(x);
  }
  require(!p.points.empty(), ErrorKind::config, key + ": no points given");
  return p;
}

} // namespace detail

/// Radii tokens are plain lengths or multiples of the grid spacing ("8h");
/// "a:b:s" expands to a, a+s, ... up to b.
inline std::vector<double> resolve_radii(const std::vector<std::string>& tokens, double h)
{
  auto value = [&](const std::string& t) {
    if (!t.empty() && t.back() == 'h')
      return detail::parse_number("analysis.radii", t.substr(0, t.size() - 1)) * h;
    return detail::parse_number("analysis.radii", t);
  };
  std::vector<double> out;
  for (const auto& t : tokens) {
    auto parts = detail::split(t, ':');
    if (parts.size() == 3) {
      double a = value(parts[0]), b = value(parts[1]), s = value(parts[2]);
      require(s > 0.0, ErrorKind::config, "analysis.radii: range step must be positive");
      for (int k = 0; a + k * s <= b * (1.0 + 1e-12); ++k)
        out.push_back(a + k * s);
    } else {
      require(parts.size() == 1, ErrorKind::config, "analysis.radii: malformed token '" + t + "'");
      out.push_back(value(parts[0]));
    }
  }
  require(!out.empty(), ErrorKind::config, "analysis.radii: no radii");
  for (std::size_t i = 0; i < out.size(); ++i) {
    require(out[i] > 0.0, ErrorKind::config, "analysis.radii: radii must be positive");
    require(i == 0 || out[i] > out[i - 1], ErrorKind::config, "analysis.radii: radii must be strictly increasing");
  }
  return out;
}

inline RunConfig parse_config(const std::string& text)
{
  std::map<std::string, std::string> given;
  std::map<std::string, int> line_of;
  {
    std::istringstream is(text);
    std::string line;
    for (int no = 1; std::getline(is, line); ++no) {
      if (auto hash = line.find('#'); hash != std::string::npos)
        line = line.substr(0, hash);
      line = detail::trim(line);
      if (line.empty())
        continue;
      auto eq = line.find('=');
      if (eq == std::string::npos)
        fail(ErrorKind::config, "line " + std::to_string(no) + ": expected 'key = value'");
      std::string key = detail::trim(line.substr(0, eq));
      std::string val = detail::trim(line.substr(eq + 1));
      if (key.empty() || val.empty())
        fail(ErrorKind::config, "line " + std::to_string(no) + ": empty key or value");
      bool known = false;
      for (const auto& k : detail::known_keys())
        known = known || key == k.key;
      if (!known)
        fail(ErrorKind::config, "line " + std::to_string(no) + ": unknown key '" + key + "'");
      if (given.count(key))
        fail(ErrorKind::config, "line " + std::to_string(no) + ": duplicate key '" + key + "'");
      given[key] = val;
      line_of[key] = no;
    }
  }

  RunConfig c;
  c.hash = config_hash(text);
  for (const auto& k : detail::known_keys())
    c.resolved[k.key] = given.count(k.key) ? given[k.key] : k.fallback;
  auto get = [&](const char* k) -> const std::string& { return c.resolved.at(k); };

  c.command = get("command");
  static const char* commands[] = {"solve", "sweep-lambda", "classify", "audit", "oracle-check"};
  require(std::find(std::begin(commands), std::end(commands), c.command) != std::end(commands),
          ErrorKind::config, "command: unknown command '" + c.command + "'");

  c.dim = static_cast<int>(detail::parse_integer("grid.dim", get("grid.dim")));
  require(c.dim == 1 || c.dim == 2, ErrorKind::config, "grid.dim: must be 1 or 2");
  for (const char* k : {"grid.x", "grid.y"}) {
    if (c.dim == 1 && std::string(k) == "grid.y")
      break;
    auto e = detail::parse_list(k, get(k));
    require(e.size() == 2 && e[0] < e[1], ErrorKind::config, std::string(k) + ": expected 'lo, hi' with lo < hi");
    c.extents.push_back({e[0], e[1]});
  }
  {
    auto n = detail::parse_list("grid.nodes", get("grid.nodes"));
    require(n.size() == 1 || static_cast<int>(n.size()) == c.dim, ErrorKind::config,
            "grid.nodes: give one count or one per axis");
    for (int a = 0; a < c.dim; ++a) {
      double v = n[n.size() == 1 ? 0 : a];
      require(v == std::floor(v) && v >= 3, ErrorKind::config, "grid.nodes: counts must be integers >= 3");
      c.nodes.push_back(static_cast<int>(v));
    }
  }

  c.g1 = detail::parse_boundary("boundary.g1", get("boundary.g1"));
  c.g2 = detail::parse_boundary("boundary.g2", get("boundary.g2"));
  c.lambda = detail::parse_number("lambda", get("lambda"));
  c.lambdas = detail::parse_list("lambdas", get("lambdas"));
  require(!c.lambdas.empty(), ErrorKind::config, "lambdas: empty list");

  c.method = get("solver.method");
  require(c.method == "picard" || c.method == "continuation", ErrorKind::config,
          "solver.method: expected picard or continuation");
  c.solver.tol = detail::parse_number("solver.tol", get("solver.tol"));
  c.solver.max_sweeps = detail::parse_integer("solver.max_sweeps", get("solver.max_sweeps"));
  if (get("solver.omega") == "auto")
    c.omega_auto = true;
  else
    c.solver.omega = detail::parse_number("solver.omega", get("solver.omega"));
  c.solver.picard_damping = detail::parse_number("solver.picard_damping", get("solver.picard_damping"));
  c.solver.eps_schedule = detail::parse_list("solver.eps_schedule", get("solver.eps_schedule"));
  c.solver.positivity_kappa = detail::parse_number("solver.positivity_kappa", get("solver.positivity_kappa"));
  c.solver.nondeg_m = detail::parse_number("solver.nondeg_m", get("solver.nondeg_m"));
  c.solver.max_outer = static_cast<int>(detail::parse_integer("solver.max_outer", get("solver.max_outer")));
  c.solver.max_newton = static_cast<int>(detail::parse_integer("solver.max_newton", get("solver.max_newton")));
  c.solver.validate();
  if (c.omega_auto)
    c.solver.omega = sor_omega_estimate(c.grid());

  c.field_source = get("field.source");
  require(c.field_source == "solve" || c.field_source == "manufactured", ErrorKind::config,
          "field.source: expected solve or manufactured");
  c.field_preset = get("field.preset");
  if (c.field_source == "manufactured") {
    static const char* presets[] = {"half-space", "polynomial", "polynomial-perturbed", "radial", "split-linear"};
    require(std::find(std::begin(presets), std::end(presets), c.field_preset) != std::end(presets),
            ErrorKind::config, "field.preset: unknown manufactured field '" + c.field_preset + "'");
  }

  const std::string comp = get("analysis.component");
  require(comp == "u" || comp == "v", ErrorKind::config, "analysis.component: expected u or v");
  c.component = comp == "u" ? Component::U : Component::V;
  c.radii_tokens = detail::split(get("analysis.radii"), ',');
  resolve_radii(c.radii_tokens, c.grid().h_max());
  c.analysis.kappa = detail::parse_number("analysis.kappa", get("analysis.kappa"));
  c.analysis.contact_kappa = detail::parse_number("analysis.contact_kappa", get("analysis.contact_kappa"));
  require(c.analysis.kappa > 0.0 && c.analysis.contact_kappa > 0.0, ErrorKind::config,
          "analysis.kappa: thresholds must be positive");
  c.analysis.quad.n_angular = static_cast<int>(detail::parse_integer("analysis.n_angular", get("analysis.n_angular")));
  c.analysis.quad.n_radial = static_cast<int>(detail::parse_integer("analysis.n_radial", get("analysis.n_radial")));
  c.analysis.quad.n_s = static_cast<int>(detail::parse_integer("analysis.n_s", get("analysis.n_s")));
  c.analysis.quad.validate();
  c.points = detail::parse_points("analysis.points", get("analysis.points"), c.dim);
  if (get("analysis.monneau") != "none") {
    auto q = detail::parse_list("analysis.monneau", get("analysis.monneau"));
    require(q.size() == 3, ErrorKind::config, "analysis.monneau: expected 'a11, a12, a22' or none");
    QuadraticForm f;
    f.m = {{{q[0], q[1]}, {q[1], q[2]}}};
    require(f.is_psd(), ErrorKind::config, "analysis.monneau: quadratic form must be positive semidefinite");
    c.monneau_q = f;
  }
  c.output_dir = get("output.dir");
  return c;
}

} // namespace fblab
