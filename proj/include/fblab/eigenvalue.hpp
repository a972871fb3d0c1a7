#pragma once

#include "fblab/error.hpp"
#include "fblab/grid.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <vector>

namespace fblab {

/// Maps grid nodes to unknown numbers for interior-only systems.
struct InteriorNumbering
{
  std::vector<std::size_t> node_of;   // unknown -> node
  std::vector<long> unknown_of;       // node -> unknown, -1 on the boundary

  explicit InteriorNumbering(const GridSpec& g)
    : unknown_of(g.size(), -1)
  {
    for (std::size_t k = 0; k < g.size(); ++k)
      if (!g.is_boundary(k)) {
        unknown_of[k] = static_cast<long>(node_of.size());
        node_of.push_back(k);
      }
  }

  std::size_t size() const noexcept { return node_of.size(); }
};

/// Triplets of -Delta_h restricted to interior unknowns (boundary values eliminated),
/// placed at row/column offset `offset`.
inline void append_neg_laplacian(const GridSpec& g, const InteriorNumbering& num, long offset,
                                 std::vector<Eigen::Triplet<double>>& trip)
{
  const double hx2 = g.h(0) * g.h(0);
  const double hy2 = g.dim() == 2 ? g.h(1) * g.h(1) : 1.0;
  const long nx = g.nodes(0);
  for (std::size_t r = 0; r < num.size(); ++r) {
    const std::size_t k = num.node_of[r];
    const long row = offset + static_cast<long>(r);
    double diag = 2.0 / hx2;
    auto couple = [&](std::size_t nb, double w) {
      long c = num.unknown_of[nb];
      if (c >= 0)
        trip.emplace_back(row, offset + c, -w);
    };
    couple(k - 1, 1.0 / hx2);
    couple(k + 1, 1.0 / hx2);
    if (g.dim() == 2) {
      diag += 2.0 / hy2;
      couple(k - static_cast<std::size_t>(nx), 1.0 / hy2);
      couple(k + static_cast<std::size_t>(nx), 1.0 / hy2);
    }
    trip.emplace_back(row, row, diag);
  }
}

struct Lambda1Options
{
  int max_iterations = 500;
  double rel_residual = 1e-8;
};

/**
 * Smallest eigenvalue of the discrete Dirichlet operator -Delta_h on the grid,
 * by inverse power iteration with a sparse Cholesky factorization.
 * Converged when |A x - mu x| <= rel_residual * mu |x|.
 */
inline double estimate_lambda1(const GridSpec& g, Lambda1Options opt = {})
{
  InteriorNumbering num(g);
  const long n = static_cast<long>(num.size());
  require(n > 0, ErrorKind::config, "grid has no interior nodes");

  std::vector<Eigen::Triplet<double>> trip;
  append_neg_laplacian(g, num, 0, trip);
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(trip.begin(), trip.end());

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(a);
  require(solver.info() == Eigen::Success, ErrorKind::numerical,
          "factorization of the discrete Laplacian failed");

  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  x.normalize();
  double mu = 0.0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    Eigen::VectorXd y = solver.solve(x);
    x = y.normalized();
    Eigen::VectorXd ax = a * x;
    mu = x.dot(ax);
    double res = (ax - mu * x).norm();
    if (res <= opt.rel_residual * mu)
      return mu;
  }
  fail(ErrorKind::numerical, "inverse power iteration for lambda1 did not converge");
}

} // namespace fblab
