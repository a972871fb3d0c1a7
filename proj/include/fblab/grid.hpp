#pragma once

#include "fblab/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <vector>

namespace fblab {

/// Coordinates in one or two dimensions; the second entry is ignored in 1D.
using Point = std::array<double, 2>;

struct Interval
{
  double lo = 0.0;
  double hi = 1.0;
};

inline double dot(const Point& a, const Point& b, int dim)
{
  return dim == 1 ? a[0] * b[0] : a[0] * b[0] + a[1] * b[1];
}

inline double norm(const Point& a, int dim) { return std::sqrt(dot(a, a, dim)); }

inline Point operator+(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Point operator-(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Point operator*(double s, const Point& a) { return {s * a[0], s * a[1]}; }

/**
 * Tensor-product grid over an axis-aligned box in one or two dimensions.
 *
 * Nodes are ordered lexicographically with x fastest: node (i, j) has flat
 * index i + j * nx. Boundary nodes are those with i in {0, nx-1} or, in 2D,
 * j in {0, ny-1}.
 */
class GridSpec
{
public:
  GridSpec() = default;

  GridSpec(int dim, std::span<const Interval> extents, std::span<const int> nodes)
  {
    require(dim == 1 || dim == 2, ErrorKind::config, "grid dimension must be 1 or 2");
    require(static_cast<int>(extents.size()) == dim && static_cast<int>(nodes.size()) == dim,
            ErrorKind::config, "grid extents/nodes must have one entry per axis");
    dim_ = dim;
    for (int a = 0; a < dim; ++a) {
      require(nodes[a] >= 3, ErrorKind::config, "each axis needs at least 3 nodes");
      require(std::isfinite(extents[a].lo) && std::isfinite(extents[a].hi) &&
                extents[a].hi > extents[a].lo,
              ErrorKind::config, "degenerate grid extent");
      lo_[a] = extents[a].lo;
      hi_[a] = extents[a].hi;
      n_[a] = nodes[a];
      h_[a] = (hi_[a] - lo_[a]) / (n_[a] - 1);
    }
  }

  int dim() const noexcept { return dim_; }
  int nodes(int axis) const noexcept { return n_[axis]; }
  double h(int axis) const noexcept { return h_[axis]; }
  double h_max() const noexcept { return dim_ == 1 ? h_[0] : std::max(h_[0], h_[1]); }
  double h_min() const noexcept { return dim_ == 1 ? h_[0] : std::min(h_[0], h_[1]); }
  double lo(int axis) const noexcept { return lo_[axis]; }
  double hi(int axis) const noexcept { return hi_[axis]; }

  /// Volume of one grid cell (h in 1D, hx*hy in 2D).
  double cell_volume() const noexcept { return dim_ == 1 ? h_[0] : h_[0] * h_[1]; }

  double box_volume() const noexcept
  {
    return dim_ == 1 ? hi_[0] - lo_[0] : (hi_[0] - lo_[0]) * (hi_[1] - lo_[1]);
  }

  std::size_t size() const noexcept
  {
    return dim_ == 1 ? static_cast<std::size_t>(n_[0])
                     : static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(n_[1]);
  }

  std::size_t index(int i, int j = 0) const noexcept
  {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * n_[0];
  }

  std::array<int, 2> multi(std::size_t idx) const noexcept
  {
    return {static_cast<int>(idx % n_[0]), dim_ == 1 ? 0 : static_cast<int>(idx / n_[0])};
  }

  Point coords(std::size_t idx) const noexcept
  {
    auto [i, j] = multi(idx);
    return {lo_[0] + i * h_[0], dim_ == 1 ? 0.0 : lo_[1] + j * h_[1]};
  }

  bool is_boundary(std::size_t idx) const noexcept
  {
    auto [i, j] = multi(idx);
    if (i == 0 || i == n_[0] - 1)
      return true;
    return dim_ == 2 && (j == 0 || j == n_[1] - 1);
  }

  std::vector<std::size_t> boundary_indices() const
  {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < size(); ++k)
      if (is_boundary(k))
        out.push_back(k);
    return out;
  }

  std::vector<std::size_t> interior_indices() const
  {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < size(); ++k)
      if (!is_boundary(k))
        out.push_back(k);
    return out;
  }

  bool contains(const Point& p, double slack = 0.0) const noexcept
  {
    for (int a = 0; a < dim_; ++a) {
      double tol = slack + 1e-12 * (hi_[a] - lo_[a]);
      if (p[a] < lo_[a] - tol || p[a] > hi_[a] + tol)
        return false;
    }
    return true;
  }

  /// True if the closed ball B_r(center) lies inside the closed box.
  bool contains_ball(const Point& center, double r) const noexcept
  {
    for (int a = 0; a < dim_; ++a) {
      double tol = 1e-12 * (hi_[a] - lo_[a]);
      if (center[a] - r < lo_[a] - tol || center[a] + r > hi_[a] + tol)
        return false;
    }
    return true;
  }

  bool operator==(const GridSpec& o) const noexcept
  {
    if (dim_ != o.dim_)
      return false;
    for (int a = 0; a < dim_; ++a)
      if (n_[a] != o.n_[a] || lo_[a] != o.lo_[a] || hi_[a] != o.hi_[a])
        return false;
    return true;
  }

private:
  int dim_ = 1;
  std::array<double, 2> lo_{0.0, 0.0};
  std::array<double, 2> hi_{1.0, 1.0};
  std::array<int, 2> n_{3, 1};
  std::array<double, 2> h_{0.5, 0.0};
};

inline GridSpec build_grid(int dim, std::span<const Interval> extents, std::span<const int> nodes)
{
  return GridSpec(dim, extents, nodes);
}

inline GridSpec grid_1d(double lo, double hi, int n)
{
  Interval e[1] = {{lo, hi}};
  int nn[1] = {n};
  return GridSpec(1, e, nn);
}

inline GridSpec grid_2d(Interval x, Interval y, int nx, int ny)
{
  Interval e[2] = {x, y};
  int nn[2] = {nx, ny};
  return GridSpec(2, e, nn);
}

/// Node values of a scalar function on a grid.
class ScalarField
{
public:
  ScalarField() = default;

  explicit ScalarField(const GridSpec& grid, double fill = 0.0)
    : grid_(grid)
    , values_(grid.size(), fill)
  {}

  ScalarField(const GridSpec& grid, std::vector<double> values)
    : grid_(grid)
    , values_(std::move(values))
  {
    require(values_.size() == grid_.size(), ErrorKind::config,
            "field value count must equal grid node count");
    for (double v : values_)
      require(std::isfinite(v), ErrorKind::numerical, "field values must be finite");
  }

  template<class F>
  static ScalarField sample(const GridSpec& grid, F&& f)
  {
    ScalarField out(grid);
    for (std::size_t k = 0; k < grid.size(); ++k)
      out.values_[k] = f(grid.coords(k));
    return out;
  }

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t k) const noexcept { return values_[k]; }
  double& operator[](std::size_t k) noexcept { return values_[k]; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  double max_abs() const noexcept
  {
    double m = 0.0;
    for (double v : values_)
      m = std::max(m, std::abs(v));
    return m;
  }

private:
  GridSpec grid_;
  std::vector<double> values_;
};

inline double max_abs_diff(const ScalarField& a, const ScalarField& b)
{
  require(a.grid() == b.grid(), ErrorKind::config, "fields live on different grids");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

/// Dirichlet data for the two components, indexed like the grid (interior entries unused).
struct BoundaryData
{
  ScalarField g1;
  ScalarField g2;

  /// Throws on negative boundary values; returns true when either component
  /// vanishes identically (semi-trivial configuration).
  bool validate() const
  {
    require(g1.grid() == g2.grid(), ErrorKind::config, "boundary data on different grids");
    bool any1 = false, any2 = false;
    for (std::size_t k : g1.grid().boundary_indices()) {
      require(g1[k] >= 0.0 && g2[k] >= 0.0, ErrorKind::config,
              "boundary data must be nonnegative");
      any1 = any1 || g1[k] > 0.0;
      any2 = any2 || g2[k] > 0.0;
    }
    return !any1 || !any2;
  }
};

template<class F1, class F2>
BoundaryData make_boundary_data(const GridSpec& grid, F1&& g1, F2&& g2)
{
  BoundaryData b{ScalarField(grid), ScalarField(grid)};
  for (std::size_t k : grid.boundary_indices()) {
    b.g1[k] = g1(grid.coords(k));
    b.g2[k] = g2(grid.coords(k));
  }
  return b;
}

/// Discrete Laplacian at node k (3-point in 1D, 5-point in 2D); k must be interior.
inline double laplacian_at(const ScalarField& f, std::size_t k)
{
  const GridSpec& g = f.grid();
  const double hx2 = g.h(0) * g.h(0);
  double lap = (f[k - 1] - 2.0 * f[k] + f[k + 1]) / hx2;
  if (g.dim() == 2) {
    const std::size_t nx = static_cast<std::size_t>(g.nodes(0));
    const double hy2 = g.h(1) * g.h(1);
    lap += (f[k - nx] - 2.0 * f[k] + f[k + nx]) / hy2;
  }
  return lap;
}

/// Central-difference Laplacian at interior nodes; boundary entries are zero.
inline ScalarField laplacian_apply(const ScalarField& f)
{
  ScalarField out(f.grid());
  for (std::size_t k = 0; k < f.size(); ++k)
    if (!f.grid().is_boundary(k))
      out[k] = laplacian_at(f, k);
  return out;
}

/// Multilinear interpolation from the enclosing cell.
inline double interpolate(const ScalarField& f, const Point& p)
{
  const GridSpec& g = f.grid();
  if (!g.contains(p)) {
    std::ostringstream os;
    os << "interpolation point (" << p[0];
    if (g.dim() == 2)
      os << ", " << p[1];
    os << ") lies outside the grid box";
    fail(ErrorKind::geometry, os.str());
  }
  std::array<int, 2> cell{0, 0};
  std::array<double, 2> t{0.0, 0.0};
  for (int a = 0; a < g.dim(); ++a) {
    double s = (p[a] - g.lo(a)) / g.h(a);
    int c = static_cast<int>(std::floor(s));
    c = std::clamp(c, 0, g.nodes(a) - 2);
    cell[a] = c;
    t[a] = std::clamp(s - c, 0.0, 1.0);
  }
  if (g.dim() == 1) {
    std::size_t k = g.index(cell[0]);
    return (1.0 - t[0]) * f[k] + t[0] * f[k + 1];
  }
  std::size_t k00 = g.index(cell[0], cell[1]);
  std::size_t k10 = k00 + 1;
  std::size_t k01 = k00 + static_cast<std::size_t>(g.nodes(0));
  std::size_t k11 = k01 + 1;
  return (1.0 - t[0]) * (1.0 - t[1]) * f[k00] + t[0] * (1.0 - t[1]) * f[k10] +
         (1.0 - t[0]) * t[1] * f[k01] + t[0] * t[1] * f[k11];
}

/// Gradient of the multilinear interpolant in the cell containing p (piecewise polynomial).
inline Point interpolant_gradient(const ScalarField& f, const Point& p)
{
  const GridSpec& g = f.grid();
  require(g.contains(p), ErrorKind::geometry, "gradient point lies outside the grid box");
  std::array<int, 2> cell{0, 0};
  std::array<double, 2> t{0.0, 0.0};
  for (int a = 0; a < g.dim(); ++a) {
    double s = (p[a] - g.lo(a)) / g.h(a);
    int c = std::clamp(static_cast<int>(std::floor(s)), 0, g.nodes(a) - 2);
    cell[a] = c;
    t[a] = std::clamp(s - c, 0.0, 1.0);
  }
  if (g.dim() == 1) {
    std::size_t k = g.index(cell[0]);
    return {(f[k + 1] - f[k]) / g.h(0), 0.0};
  }
  std::size_t k00 = g.index(cell[0], cell[1]);
  std::size_t k10 = k00 + 1;
  std::size_t k01 = k00 + static_cast<std::size_t>(g.nodes(0));
  std::size_t k11 = k01 + 1;
  double dx = ((1.0 - t[1]) * (f[k10] - f[k00]) + t[1] * (f[k11] - f[k01])) / g.h(0);
  double dy = ((1.0 - t[0]) * (f[k01] - f[k00]) + t[0] * (f[k11] - f[k10])) / g.h(1);
  return {dx, dy};
}

/// Partial derivative along one axis: centered in the interior, second-order one-sided at the boundary.
inline ScalarField partial_derivative(const ScalarField& f, int axis)
{
  const GridSpec& g = f.grid();
  ScalarField out(g);
  const std::size_t stride = axis == 0 ? 1 : static_cast<std::size_t>(g.nodes(0));
  const int n = g.nodes(axis);
  const double h = g.h(axis);
  for (std::size_t k = 0; k < f.size(); ++k) {
    int i = g.multi(k)[axis];
    if (i == 0)
      out[k] = (-3.0 * f[k] + 4.0 * f[k + stride] - f[k + 2 * stride]) / (2.0 * h);
    else if (i == n - 1)
      out[k] = (3.0 * f[k] - 4.0 * f[k - stride] + f[k - 2 * stride]) / (2.0 * h);
    else
      out[k] = (f[k + stride] - f[k - stride]) / (2.0 * h);
  }
  return out;
}

/// A field bundled with its node-gradient components for repeated point queries.
struct FieldSampler
{
  ScalarField value;
  std::array<ScalarField, 2> grad;

  explicit FieldSampler(const ScalarField& f)
    : value(f)
  {
    for (int a = 0; a < f.grid().dim(); ++a)
      grad[a] = partial_derivative(f, a);
  }

  int dim() const noexcept { return value.grid().dim(); }
  double operator()(const Point& p) const { return interpolate(value, p); }
  Point gradient(const Point& p) const
  {
    Point out{interpolate(grad[0], p), 0.0};
    if (dim() == 2)
      out[1] = interpolate(grad[1], p);
    return out;
  }
};

/// Grid CSV dump: header `x[,y],value`, lexicographic rows, 17 significant digits.
inline void write_field_csv(std::ostream& os, const ScalarField& f)
{
  const GridSpec& g = f.grid();
  os << (g.dim() == 1 ? "x,value\n" : "x,y,value\n");
  os << std::setprecision(17);
  for (std::size_t k = 0; k < f.size(); ++k) {
    Point p = g.coords(k);
    os << p[0] << ',';
    if (g.dim() == 2)
      os << p[1] << ',';
    os << f[k] << '\n';
  }
}

} // namespace fblab
