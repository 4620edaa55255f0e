#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference
// implementation; wider variants are selected at runtime when the CPU
// supports them. Set PSYS_SIMD=scalar in the environment to force the
// reference path.

#include <cstddef>
#include <span>

namespace psys::simd {

enum class Isa { scalar, avx2 };

/// Borrowed compressed-sparse-row matrix.
struct CsrView {
  const int* row_ptr;
  const int* cols;
  const double* vals;
  std::size_t rows;
};

struct KernelTable {
  Isa isa;
  const char* name;

  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = x + alpha * y
  void (*xpay)(const double* x, double alpha, double* y, std::size_t n);
  // out = a .* b
  void (*multiply)(const double* a, const double* b, double* out, std::size_t n);
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
  // y = A x
  void (*spmv)(const CsrView& a, const double* x, double* y);

  // out[i] = (u[i+1] - u[i]) * inv_h for i < cells
  void (*slopes)(const double* u, std::size_t cells, double inv_h, double* out);

  // One row of cells on the diagonal-split lattice. `lower` and `upper` are
  // the node rows below and above (cells + 1 values each). The lower
  // triangle of cell i is (ll, lr, ur), the upper one (ll, ur, ul).
  void (*tri_gradients)(const double* lower, const double* upper, std::size_t cells,
                        double inv_hx, double inv_hy, double* lo_gx, double* lo_gy,
                        double* up_gx, double* up_gy);
  void (*tri_means)(const double* lower, const double* upper, std::size_t cells,
                    double* lo_mean, double* up_mean);
};

const KernelTable& scalar_kernels();

/// nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_kernels();

/// The table used by the library. Chosen once at first use.
const KernelTable& active();

/// Force a variant. Returns false (and changes nothing) if unavailable.
bool select(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), y.size());
}
inline void xpay(std::span<const double> x, double alpha, std::span<double> y) {
  active().xpay(x.data(), alpha, y.data(), y.size());
}
inline void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  active().multiply(a.data(), b.data(), out.data(), out.size());
}
inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  return active().max_abs_diff(a.data(), b.data(), a.size());
}

}  // namespace psys::simd
