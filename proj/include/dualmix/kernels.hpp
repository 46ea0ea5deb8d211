#pragma once

#include <cstddef>

// Hot O(n) accumulation kernels behind the moment statistics pass. Each
// kernel exists as a portable scalar reference and, on x86-64, an AVX2
// variant compiled in its own translation unit; power_sums() dispatches at
// runtime based on CPU support. Both variants use the same two-level blocked
// summation (block size 1024, partial sums combined afterwards) so results
// agree to near machine precision on large inputs.
namespace dualmix::kernels {

inline constexpr int kMaxPowerOrder = 8;

// sums[k-1] = sum_i x[i]^k for k = 1..max_order (1 <= max_order <= 8).
void power_sums(const double* x, std::size_t n, int max_order, double* sums);
void power_sums_scalar(const double* x, std::size_t n, int max_order, double* sums);

// Cross power sums for paired samples: for a = 0..amax, b = 0..bmax,
// sums[a * (bmax + 1) + b] = sum_i x[i]^a y[i]^b. Scalar only; bivariate
// scenarios use samples far too small for vectorization to matter.
void cross_power_sums(const double* x, const double* y, std::size_t n, int amax,
                      int bmax, double* sums);

// True when the AVX2 variant is compiled in and the CPU supports it.
bool avx2_available();

// Name of the variant power_sums() will use: "avx2" or "scalar".
const char* active_backend();

#if defined(DUALMIX_HAVE_AVX2)
void power_sums_avx2(const double* x, std::size_t n, int max_order, double* sums);
#endif

}  // namespace dualmix::kernels
