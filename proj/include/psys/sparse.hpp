#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "psys/simd.hpp"

namespace psys {

struct CsrMatrix {
  std::size_t rows = 0;
  std::vector<int> row_ptr;
  std::vector<int> cols;
  std::vector<double> vals;

  simd::CsrView view() const { return {row_ptr.data(), cols.data(), vals.data(), rows}; }
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> diagonal() const;
};

struct CgResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
  /// A search direction had p^T A p <= 0; the matrix is not positive definite.
  bool indefinite = false;
};

/// Jacobi-preconditioned conjugate gradients from x = 0, stopping when
/// ||b - A x|| <= rel_tol * ||b||.
CgResult pcg(const CsrMatrix& a, std::span<const double> b, std::span<double> x, double rel_tol,
             int max_iter);

}  // namespace psys
