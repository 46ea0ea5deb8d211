// AVX2 variant of the power-sum kernel. This translation unit is compiled
// with -mavx2; it must only be entered after a runtime CPU check.
#include "dualmix/kernels.hpp"

#if defined(DUALMIX_HAVE_AVX2)

#include <immintrin.h>

#include <cstddef>
#include <stdexcept>

namespace dualmix::kernels {

namespace {
constexpr std::size_t kBlock = 1024;

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}
}  // namespace

void power_sums_avx2(const double* x, std::size_t n, int max_order, double* sums) {
  if (max_order < 1 || max_order > kMaxPowerOrder) {
    throw std::invalid_argument("power sum order must be in [1, 8]");
  }
  for (int k = 0; k < max_order; ++k) sums[k] = 0.0;

  std::size_t i = 0;
  while (i < n) {
    const std::size_t end = (n - i > kBlock) ? i + kBlock : n;
    __m256d acc[kMaxPowerOrder];
    for (int k = 0; k < max_order; ++k) acc[k] = _mm256_setzero_pd();

    std::size_t j = i;
    for (; j + 4 <= end; j += 4) {
      const __m256d v = _mm256_loadu_pd(x + j);
      __m256d p = v;
      acc[0] = _mm256_add_pd(acc[0], p);
      for (int k = 1; k < max_order; ++k) {
        p = _mm256_mul_pd(p, v);
        acc[k] = _mm256_add_pd(acc[k], p);
      }
    }
    double block[kMaxPowerOrder];
    for (int k = 0; k < max_order; ++k) block[k] = hsum(acc[k]);
    // Residual tail of the block, at most 3 elements.
    for (; j < end; ++j) {
      const double v = x[j];
      double p = v;
      block[0] += p;
      for (int k = 1; k < max_order; ++k) {
        p *= v;
        block[k] += p;
      }
    }
    for (int k = 0; k < max_order; ++k) sums[k] += block[k];
    i = end;
  }
}

}  // namespace dualmix::kernels

#endif  // DUALMIX_HAVE_AVX2
