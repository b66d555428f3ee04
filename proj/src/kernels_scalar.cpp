#include "edchan/kernels.hpp"

namespace edchan::kernels::scalar {

void gemm(std::size_t m, std::size_t n, std::size_t k, const Complex* a, const Complex* b,
          Complex* c) noexcept {
  for (std::size_t i = 0; i < m; ++i) {
    Complex* crow = c + i * n;
    for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      // Spelled out: std::complex operator* carries NaN/Inf recovery branches.
      const double ar = a[i * k + p].real();
      const double ai = a[i * k + p].imag();
      const Complex* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) {
        const double br = brow[j].real();
        const double bi = brow[j].imag();
        crow[j] += Complex(ar * br - ai * bi, ar * bi + ai * br);
      }
    }
  }
}

void gemv(std::size_t m, std::size_t k, const Complex* a, const Complex* x, Complex* y) noexcept {
  for (std::size_t i = 0; i < m; ++i) {
    double re = 0.0;
    double im = 0.0;
    const Complex* arow = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      re += arow[p].real() * x[p].real() - arow[p].imag() * x[p].imag();
      im += arow[p].real() * x[p].imag() + arow[p].imag() * x[p].real();
    }
    y[i] = Complex(re, im);
  }
}

}  // namespace edchan::kernels::scalar
