#include <atomic>
#include <cstdlib>
#include <string_view>

#include "edchan/kernels.hpp"

namespace edchan::kernels {

namespace {

bool cpu_has_avx2() noexcept {
#if EDCHAN_HAVE_AVX2_KERNELS && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() noexcept {
  if (const char* env = std::getenv("EDCHAN_SIMD"); env && std::string_view(env) == "scalar") {
    return Isa::scalar;
  }
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& active() noexcept {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::avx2:
      return "avx2";
    case Isa::scalar:
      break;
  }
  return "scalar";
}

bool isa_available(Isa isa) noexcept {
  if (isa == Isa::scalar) return true;
  return cpu_has_avx2();
}

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

bool set_active_isa(Isa isa) noexcept {
  if (!isa_available(isa)) return false;
  active().store(isa, std::memory_order_relaxed);
  return true;
}

void gemm(std::size_t m, std::size_t n, std::size_t k, const Complex* a, const Complex* b,
          Complex* c) noexcept {
#if EDCHAN_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::gemm(m, n, k, a, b, c);
#endif
  scalar::gemm(m, n, k, a, b, c);
}

void gemv(std::size_t m, std::size_t k, const Complex* a, const Complex* x, Complex* y) noexcept {
#if EDCHAN_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::gemv(m, k, a, x, y);
#endif
  scalar::gemv(m, k, a, x, y);
}

}  // namespace edchan::kernels
