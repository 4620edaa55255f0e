// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "kernels_impl.hpp"

namespace psys::simd::detail {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void xpay(const double* x, double alpha, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = x[i] + alpha * y[i];
}

void multiply(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign, d));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = std::fmax(std::fmax(lanes[0], lanes[1]), std::fmax(lanes[2], lanes[3]));
  for (; i < n; ++i) r = std::fmax(r, std::fabs(a[i] - b[i]));
  return r;
}

void spmv(const CsrView& a, const double* x, double* y) {
  for (std::size_t r = 0; r < a.rows; ++r) {
    int k = a.row_ptr[r];
    const int end = a.row_ptr[r + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; k + 4 <= end; k += 4) {
      const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(a.cols + k));
      const __m256d xv = _mm256_i32gather_pd(x, idx, 8);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(a.vals + k), xv, acc);
    }
    double s = hsum(acc);
    for (; k < end; ++k) s += a.vals[k] * x[a.cols[k]];
    y[r] = s;
  }
}

void slopes(const double* u, std::size_t cells, double inv_h, double* out) {
  const __m256d vh = _mm256_set1_pd(inv_h);
  std::size_t i = 0;
  for (; i + 4 <= cells; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(u + i + 1), _mm256_loadu_pd(u + i));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(d, vh));
  }
  for (; i < cells; ++i) out[i] = (u[i + 1] - u[i]) * inv_h;
}

void tri_gradients(const double* lower, const double* upper, std::size_t cells, double inv_hx,
                   double inv_hy, double* lo_gx, double* lo_gy, double* up_gx, double* up_gy) {
  const __m256d vx = _mm256_set1_pd(inv_hx);
  const __m256d vy = _mm256_set1_pd(inv_hy);
  std::size_t i = 0;
  for (; i + 4 <= cells; i += 4) {
    const __m256d l0 = _mm256_loadu_pd(lower + i);
    const __m256d l1 = _mm256_loadu_pd(lower + i + 1);
    const __m256d u0 = _mm256_loadu_pd(upper + i);
    const __m256d u1 = _mm256_loadu_pd(upper + i + 1);
    _mm256_storeu_pd(lo_gx + i, _mm256_mul_pd(_mm256_sub_pd(l1, l0), vx));
    _mm256_storeu_pd(lo_gy + i, _mm256_mul_pd(_mm256_sub_pd(u1, l1), vy));
    _mm256_storeu_pd(up_gx + i, _mm256_mul_pd(_mm256_sub_pd(u1, u0), vx));
    _mm256_storeu_pd(up_gy + i, _mm256_mul_pd(_mm256_sub_pd(u0, l0), vy));
  }
  for (; i < cells; ++i) {
    lo_gx[i] = (lower[i + 1] - lower[i]) * inv_hx;
    lo_gy[i] = (upper[i + 1] - lower[i + 1]) * inv_hy;
    up_gx[i] = (upper[i + 1] - upper[i]) * inv_hx;
    up_gy[i] = (upper[i] - lower[i]) * inv_hy;
  }
}

void tri_means(const double* lower, const double* upper, std::size_t cells, double* lo_mean,
               double* up_mean) {
  constexpr double third = 1.0 / 3.0;
  const __m256d vt = _mm256_set1_pd(third);
  std::size_t i = 0;
  for (; i + 4 <= cells; i += 4) {
    const __m256d l0 = _mm256_loadu_pd(lower + i);
    const __m256d l1 = _mm256_loadu_pd(lower + i + 1);
    const __m256d u0 = _mm256_loadu_pd(upper + i);
    const __m256d u1 = _mm256_loadu_pd(upper + i + 1);
    _mm256_storeu_pd(lo_mean + i, _mm256_mul_pd(_mm256_add_pd(_mm256_add_pd(l0, l1), u1), vt));
    _mm256_storeu_pd(up_mean + i, _mm256_mul_pd(_mm256_add_pd(_mm256_add_pd(l0, u1), u0), vt));
  }
  for (; i < cells; ++i) {
    lo_mean[i] = ((lower[i] + lower[i + 1]) + upper[i + 1]) * third;
    up_mean[i] = ((lower[i] + upper[i + 1]) + upper[i]) * third;
  }
}

}  // namespace

const KernelTable kAvx2Table = {
    Isa::avx2, "avx2", dot, axpy, xpay, multiply, max_abs_diff, spmv, slopes, tri_gradients, tri_means,
};

}  // namespace psys::simd::detail
