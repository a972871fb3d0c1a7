#pragma once

#include "fblab/grid.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <unordered_map>
#include <vector>

namespace fblab {

enum class Component
{
  U,
  V
};

inline const char* to_string(Component c) { return c == Component::U ? "U" : "V"; }

/// Node-wise positivity indicator u_i > kappa * h^2 (h = largest spacing).
inline std::vector<char> positivity_mask(const ScalarField& u, double kappa)
{
  require(kappa > 0.0, ErrorKind::config, "positivity kappa must be positive");
  const double h = u.grid().h_max();
  const double threshold = kappa * h * h;
  std::vector<char> mask(u.size());
  for (std::size_t k = 0; k < u.size(); ++k)
    mask[k] = u[k] > threshold ? 1 : 0;
  return mask;
}

struct FreeBoundaryPoint
{
  Point x;
  Component component = Component::U;
  std::optional<Point> normal; ///< unit vector pointing into the positivity set
};

struct FreeBoundarySet
{
  std::vector<FreeBoundaryPoint> points;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }

  void append(const FreeBoundarySet& o)
  {
    points.insert(points.end(), o.points.begin(), o.points.end());
  }
};

/**
 * Discrete free boundary of u: for every grid edge whose endpoints differ in
 * positivity_mask, emit the linear-interpolation crossing of u = kappa h^2.
 * Crossings closer than h/2 to an already emitted point are dropped.
 */
inline FreeBoundarySet extract_free_boundary(const ScalarField& u, double kappa,
                                             Component component = Component::U)
{
  const GridSpec& g = u.grid();
  const auto mask = positivity_mask(u, kappa);
  const double h = g.h_max();
  const double threshold = kappa * h * h;
  const double merge = 0.5 * h;

  FieldSampler sampler(u);
  FreeBoundarySet out;
  std::unordered_map<std::int64_t, std::vector<std::size_t>> buckets;
  auto key = [&](const Point& p, long di, long dj) {
    long bi = static_cast<long>(std::floor((p[0] - g.lo(0)) / merge)) + di;
    long bj = g.dim() == 2 ? static_cast<long>(std::floor((p[1] - g.lo(1)) / merge)) + dj : 0;
    return static_cast<std::int64_t>(bi) * 1000003LL + bj;
  };

  auto emit = [&](std::size_t a, std::size_t b) {
    double ua = u[a], ub = u[b];
    double t = std::clamp((threshold - ua) / (ub - ua), 0.0, 1.0);
    Point pa = g.coords(a), pb = g.coords(b);
    Point p = pa + t * (pb - pa);
    for (long di = -1; di <= 1; ++di)
      for (long dj = (g.dim() == 2 ? -1 : 0); dj <= (g.dim() == 2 ? 1 : 0); ++dj) {
        auto it = buckets.find(key(p, di, dj));
        if (it == buckets.end())
          continue;
        for (std::size_t q : it->second)
          if (norm(out.points[q].x - p, g.dim()) < merge)
            return;
      }
    FreeBoundaryPoint fp{p, component, std::nullopt};
    Point grad = sampler.gradient(p);
    double gn = norm(grad, g.dim());
    if (gn > 0.0)
      fp.normal = (1.0 / gn) * grad;
    buckets[key(p, 0, 0)].push_back(out.points.size());
    out.points.push_back(fp);
  };

  const std::size_t nx = static_cast<std::size_t>(g.nodes(0));
  for (std::size_t k = 0; k < g.size(); ++k) {
    auto [i, j] = g.multi(k);
    if (i + 1 < g.nodes(0) && mask[k] != mask[k + 1])
      emit(k, k + 1);
    if (g.dim() == 2 && j + 1 < g.nodes(1) && mask[k] != mask[k + nx])
      emit(k, k + nx);
  }
  return out;
}

/// FreeBoundary CSV: `x[,y],component`.
inline void write_free_boundary_csv(std::ostream& os, const FreeBoundarySet& fb, int dim)
{
  os << (dim == 1 ? "x,component\n" : "x,y,component\n");
  os << std::setprecision(17);
  for (const auto& p : fb.points) {
    os << p.x[0] << ',';
    if (dim == 2)
      os << p.x[1] << ',';
    os << to_string(p.component) << '\n';
  }
}

} // namespace fblab
