#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "psys/field.hpp"

namespace psys::test {

inline ScalarField random_field(const GridPtr& g, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(g->node_count());
  for (double& x : v) x = d(rng);
  return ScalarField(g, std::move(v));
}

inline double rel_err(double a, double b) { return std::fabs(a - b) / std::max(1e-300, std::fabs(b)); }

/// Dense Gaussian elimination with partial pivoting; a is row-major n x n.
inline std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::fabs(a[r * n + c]) > std::fabs(a[piv * n + c])) piv = r;
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
      std::swap(b[c], b[piv]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double m = a[r * n + c] / a[c * n + c];
      if (m == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= m * a[c * n + k];
      b[r] -= m * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i * n + k] * x[k];
    x[i] = s / a[i * n + i];
  }
  return x;
}

/// Nodal solution of  K u + sigma M u = 0  with u = boundary on the box edge,
/// K the P1 stiffness of the diagonal-split lattice written out as its
/// 5-point stencil and M the vertex-lumped mass (hx hy per interior node).
inline std::vector<double> monolithic_reaction_diffusion(const Box& box, int n, double sigma, double boundary) {
  const double hx = (box.x1 - box.x0) / n, hy = (box.y1 - box.y0) / n;
  const int m = n - 1;
  const std::size_t N = static_cast<std::size_t>(m) * m;
  std::vector<double> a(N * N, 0.0), b(N, 0.0);
  const double cx = hy / hx, cy = hx / hy;
  auto id = [m](int i, int j) { return static_cast<std::size_t>((j - 1) * m + (i - 1)); };
  for (int j = 1; j <= m; ++j)
    for (int i = 1; i <= m; ++i) {
      const std::size_t r = id(i, j);
      a[r * N + r] = 2.0 * cx + 2.0 * cy + sigma * hx * hy;
      const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
      const double w[4] = {cx, cx, cy, cy};
      for (int q = 0; q < 4; ++q) {
        const int ii = nb[q][0], jj = nb[q][1];
        if (ii == 0 || jj == 0 || ii == n || jj == n)
          b[r] += w[q] * boundary;
        else
          a[r * N + id(ii, jj)] = -w[q];
      }
    }
  const auto xin = dense_solve(std::move(a), std::move(b));
  std::vector<double> full(static_cast<std::size_t>(n + 1) * (n + 1), boundary);
  for (int j = 1; j <= m; ++j)
    for (int i = 1; i <= m; ++i) full[static_cast<std::size_t>(j) * (n + 1) + i] = xin[id(i, j)];
  return full;
}

}  // namespace psys::test
