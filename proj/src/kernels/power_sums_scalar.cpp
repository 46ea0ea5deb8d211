#include <cstddef>
#include <stdexcept>

#include "dualmix/kernels.hpp"

namespace dualmix::kernels {

namespace {
constexpr std::size_t kBlock = 1024;
}

void power_sums_scalar(const double* x, std::size_t n, int max_order, double* sums) {
  if (max_order < 1 || max_order > kMaxPowerOrder) {
    throw std::invalid_argument("power sum order must be in [1, 8]");
  }
  for (int k = 0; k < max_order; ++k) sums[k] = 0.0;

  double block[kMaxPowerOrder];
  std::size_t i = 0;
  while (i < n) {
    const std::size_t end = (n - i > kBlock) ? i + kBlock : n;
    for (int k = 0; k < max_order; ++k) block[k] = 0.0;
    for (; i < end; ++i) {
      const double v = x[i];
      double p = v;
      block[0] += p;
      for (int k = 1; k < max_order; ++k) {
        p *= v;
        block[k] += p;
      }
    }
    for (int k = 0; k < max_order; ++k) sums[k] += block[k];
  }
}

void cross_power_sums(const double* x, const double* y, std::size_t n, int amax,
                      int bmax, double* sums) {
  if (amax < 0 || bmax < 0 || amax > kMaxPowerOrder || bmax > kMaxPowerOrder) {
    throw std::invalid_argument("cross power sum orders must be in [0, 8]");
  }
  const int cols = bmax + 1;
  const int cells = (amax + 1) * cols;
  for (int c = 0; c < cells; ++c) sums[c] = 0.0;

  double xp[kMaxPowerOrder + 1];
  double yp[kMaxPowerOrder + 1];
  double block[(kMaxPowerOrder + 1) * (kMaxPowerOrder + 1)];
  std::size_t i = 0;
  while (i < n) {
    const std::size_t end = (n - i > kBlock) ? i + kBlock : n;
    for (int c = 0; c < cells; ++c) block[c] = 0.0;
    for (; i < end; ++i) {
      xp[0] = 1.0;
      yp[0] = 1.0;
      for (int a = 1; a <= amax; ++a) xp[a] = xp[a - 1] * x[i];
      for (int b = 1; b <= bmax; ++b) yp[b] = yp[b - 1] * y[i];
      for (int a = 0; a <= amax; ++a)
        for (int b = 0; b <= bmax; ++b) block[a * cols + b] += xp[a] * yp[b];
    }
    for (int c = 0; c < cells; ++c) sums[c] += block[c];
  }
}

}  // namespace dualmix::kernels
