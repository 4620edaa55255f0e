#include <cmath>

#include "kernels_impl.hpp"

namespace psys::simd::detail {

namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void xpay(const double* x, double alpha, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + alpha * y[i];
}

void multiply(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(a[i] - b[i]));
  return m;
}

void spmv(const CsrView& a, const double* x, double* y) {
  for (std::size_t r = 0; r < a.rows; ++r) {
    double s = 0.0;
    for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) s += a.vals[k] * x[a.cols[k]];
    y[r] = s;
  }
}

void slopes(const double* u, std::size_t cells, double inv_h, double* out) {
  for (std::size_t i = 0; i < cells; ++i) out[i] = (u[i + 1] - u[i]) * inv_h;
}

void tri_gradients(const double* lower, const double* upper, std::size_t cells, double inv_hx,
                   double inv_hy, double* lo_gx, double* lo_gy, double* up_gx, double* up_gy) {
  for (std::size_t i = 0; i < cells; ++i) {
    lo_gx[i] = (lower[i + 1] - lower[i]) * inv_hx;
    lo_gy[i] = (upper[i + 1] - lower[i + 1]) * inv_hy;
    up_gx[i] = (upper[i + 1] - upper[i]) * inv_hx;
    up_gy[i] = (upper[i] - lower[i]) * inv_hy;
  }
}

void tri_means(const double* lower, const double* upper, std::size_t cells, double* lo_mean,
               double* up_mean) {
  constexpr double third = 1.0 / 3.0;
  for (std::size_t i = 0; i < cells; ++i) {
    lo_mean[i] = ((lower[i] + lower[i + 1]) + upper[i + 1]) * third;
    up_mean[i] = ((lower[i] + upper[i + 1]) + upper[i]) * third;
  }
}

}  // namespace

const KernelTable kScalarTable = {
    Isa::scalar, "scalar", dot, axpy, xpay, multiply, max_abs_diff, spmv, slopes, tri_gradients, tri_means,
};

}  // namespace psys::simd::detail
