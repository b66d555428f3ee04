#pragma once

// Complex inner-loop kernels with a scalar reference path and an AVX2/FMA
// path. The active path is chosen once at startup from CPUID; setting
// EDCHAN_SIMD=scalar in the environment forces the reference kernels.
//
// All buffers are row-major interleaved std::complex<double>.

#include <complex>
#include <cstddef>
#include <string_view>

namespace edchan::kernels {

using Complex = std::complex<double>;

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;

/// True if this build contains the path and the CPU can run it.
bool isa_available(Isa isa) noexcept;

Isa active_isa() noexcept;

/// Switches the dispatch target. Returns false (and changes nothing) when the
/// requested path is unavailable. Intended for tests and benchmarks.
bool set_active_isa(Isa isa) noexcept;

// c (m x n) = a (m x k) * b (k x n). c must not alias a or b.
void gemm(std::size_t m, std::size_t n, std::size_t k, const Complex* a, const Complex* b,
          Complex* c) noexcept;

// y (m) = a (m x k) * x (k). y must not alias a or x.
void gemv(std::size_t m, std::size_t k, const Complex* a, const Complex* x, Complex* y) noexcept;

namespace scalar {
void gemm(std::size_t m, std::size_t n, std::size_t k, const Complex* a, const Complex* b,
          Complex* c) noexcept;
void gemv(std::size_t m, std::size_t k, const Complex* a, const Complex* x, Complex* y) noexcept;
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define EDCHAN_HAVE_AVX2_KERNELS 1
namespace avx2 {
void gemm(std::size_t m, std::size_t n, std::size_t k, const Complex* a, const Complex* b,
          Complex* c) noexcept;
void gemv(std::size_t m, std::size_t k, const Complex* a, const Complex* x, Complex* y) noexcept;
}  // namespace avx2
#else
#define EDCHAN_HAVE_AVX2_KERNELS 0
#endif

}  // namespace edchan::kernels
