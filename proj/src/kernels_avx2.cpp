#include "edchan/kernels.hpp"

#if EDCHAN_HAVE_AVX2_KERNELS

#include <immintrin.h>

#define EDCHAN_AVX2 __attribute__((target("avx2,fma")))

namespace edchan::kernels::avx2 {

namespace {

// (ar + i ai) * (b0, b1) for two packed complex values b.
EDCHAN_AVX2 inline __m256d cmul_broadcast(__m256d ar, __m256d ai, __m256d b) {
  const __m256d b_swapped = _mm256_permute_pd(b, 0b0101);
  return _mm256_fmaddsub_pd(ar, b, _mm256_mul_pd(ai, b_swapped));
}

// Elementwise product of two packed complex pairs.
EDCHAN_AVX2 inline __m256d cmul(__m256d a, __m256d b) {
  const __m256d ar = _mm256_movedup_pd(a);
  const __m256d ai = _mm256_permute_pd(a, 0b1111);
  return cmul_broadcast(ar, ai, b);
}

}  // namespace

EDCHAN_AVX2 void gemm(std::size_t m, std::size_t n, std::size_t k, const Complex* a,
                      const Complex* b, Complex* c) noexcept {
  const auto* bd = reinterpret_cast<const double*>(b);
  auto* cd = reinterpret_cast<double*>(c);
  const std::size_t n_pairs = n / 2;
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = cd + 2 * i * n;
    for (std::size_t j = 0; j < 2 * n; ++j) crow[j] = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      const double ar_s = a[i * k + p].real();
      const double ai_s = a[i * k + p].imag();
      const __m256d ar = _mm256_set1_pd(ar_s);
      const __m256d ai = _mm256_set1_pd(ai_s);
      const double* brow = bd + 2 * p * n;
      for (std::size_t q = 0; q < n_pairs; ++q) {
        const __m256d bv = _mm256_loadu_pd(brow + 4 * q);
        const __m256d cv = _mm256_loadu_pd(crow + 4 * q);
        _mm256_storeu_pd(crow + 4 * q, _mm256_add_pd(cv, cmul_broadcast(ar, ai, bv)));
      }
      if (n & 1) {
        const std::size_t j = n - 1;
        const double br = brow[2 * j];
        const double bi = brow[2 * j + 1];
        crow[2 * j] += ar_s * br - ai_s * bi;
        crow[2 * j + 1] += ar_s * bi + ai_s * br;
      }
    }
  }
}

EDCHAN_AVX2 void gemv(std::size_t m, std::size_t k, const Complex* a, const Complex* x,
                      Complex* y) noexcept {
  const auto* xd = reinterpret_cast<const double*>(x);
  const std::size_t k_pairs = k / 2;
  for (std::size_t i = 0; i < m; ++i) {
    const auto* arow = reinterpret_cast<const double*>(a + i * k);
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t q = 0; q < k_pairs; ++q) {
      acc = _mm256_add_pd(acc, cmul(_mm256_loadu_pd(arow + 4 * q), _mm256_loadu_pd(xd + 4 * q)));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double re = lanes[0] + lanes[2];
    double im = lanes[1] + lanes[3];
    if (k & 1) {
      const std::size_t p = k - 1;
      re += arow[2 * p] * xd[2 * p] - arow[2 * p + 1] * xd[2 * p + 1];
      im += arow[2 * p] * xd[2 * p + 1] + arow[2 * p + 1] * xd[2 * p];
    }
    y[i] = Complex(re, im);
  }
}

}  // namespace edchan::kernels::avx2

#endif
