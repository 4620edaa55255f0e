#include "psys/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace psys {

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  simd::active().spmv(view(), x.data(), y.data());
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
      if (static_cast<std::size_t>(cols[k]) == r) d[r] += vals[k];
  return d;
}

CgResult pcg(const CsrMatrix& a, std::span<const double> b, std::span<double> x, double rel_tol,
             int max_iter) {
  const std::size_t n = a.rows;
  CgResult res;
  std::fill(x.begin(), x.end(), 0.0);

  const double b_norm = std::sqrt(simd::dot(b, b));
  if (b_norm == 0.0) {
    res.converged = true;
    return res;
  }

  std::vector<double> inv_diag = a.diagonal();
  for (double& d : inv_diag) d = d > 0.0 ? 1.0 / d : 1.0;

  std::vector<double> r(b.begin(), b.end()), z(n), p(n), ap(n);
  simd::multiply(inv_diag, r, z);
  p = z;
  double rz = simd::dot(r, z);

  for (int it = 1; it <= max_iter; ++it) {
    a.multiply(p, ap);
    const double curvature = simd::dot(p, ap);
    if (!(curvature > 0.0)) {
      res.indefinite = true;
      res.iterations = it;
      return res;
    }
    const double alpha = rz / curvature;
    simd::axpy(alpha, p, x);
    simd::axpy(-alpha, ap, r);
    res.iterations = it;
    res.relative_residual = std::sqrt(simd::dot(r, r)) / b_norm;
    if (res.relative_residual <= rel_tol) {
      res.converged = true;
      return res;
    }
    simd::multiply(inv_diag, r, z);
    const double rz_next = simd::dot(r, z);
    simd::xpay(z, rz_next / rz, p);
    rz = rz_next;
  }
  return res;
}

}  // namespace psys
