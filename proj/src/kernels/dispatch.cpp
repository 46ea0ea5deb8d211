#include "dualmix/kernels.hpp"

namespace dualmix::kernels {

bool avx2_available() {
#if defined(DUALMIX_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

const char* active_backend() { return avx2_available() ? "avx2" : "scalar"; }

void power_sums(const double* x, std::size_t n, int max_order, double* sums) {
#if defined(DUALMIX_HAVE_AVX2)
  if (avx2_available()) {
    power_sums_avx2(x, n, max_order, sums);
    return;
  }
#endif
  power_sums_scalar(x, n, max_order, sums);
}

}  // namespace dualmix::kernels
