#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "dualmix/kernels.hpp"
#include "dualmix/rng.hpp"

namespace kern = dualmix::kernels;

namespace {

// Straightforward oracle with extended-precision accumulation.
std::vector<double> naive_power_sums(const std::vector<double>& x, int max_order) {
  std::vector<long double> acc(max_order, 0.0L);
  for (double v : x) {
    long double p = 1.0L;
    for (int k = 0; k < max_order; ++k) {
      p *= v;
      acc[k] += p;
    }
  }
  std::vector<double> out(max_order);
  for (int k = 0; k < max_order; ++k) out[k] = static_cast<double>(acc[k]);
  return out;
}

std::vector<double> random_values(std::uint64_t seed, std::size_t n, double lo,
                                  double hi) {
  dualmix::CounterRng rng(seed, 0);
  std::vector<double> x(n);
  for (double& v : x) v = lo + (hi - lo) * rng.next_unit();
  return x;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("power sums match the extended-precision oracle") {
  const auto x = random_values(41, 257, 0.0, 2.0);
  const auto ref = naive_power_sums(x, 8);
  double sums[8];
  kern::power_sums(x.data(), x.size(), 8, sums);
  for (int k = 0; k < 8; ++k) {
    CHECK(std::fabs(sums[k] - ref[k]) <= 1e-13 * std::max(1.0, std::fabs(ref[k])));
  }
}

TEST_CASE("dispatched and scalar variants agree on a large input") {
  const std::size_t n = 1000000;
  const auto x = random_values(42, n, 0.05, 1.05);
  double a[8];
  double b[8];
  kern::power_sums(x.data(), n, 8, a);
  kern::power_sums_scalar(x.data(), n, 8, b);
  for (int k = 0; k < 8; ++k) {
    CAPTURE(k);
    CHECK(std::fabs(a[k] - b[k]) <= 1e-12 * std::fabs(b[k]));
  }
  MESSAGE("active backend: ", kern::active_backend());
}

TEST_CASE("block boundary tails are handled for every residue") {
  for (std::size_t n = 1020; n <= 1028; ++n) {
    const auto x = random_values(1000 + n, n, -1.0, 1.0);
    const auto ref = naive_power_sums(x, 5);
    double sums[5];
    kern::power_sums(x.data(), n, 5, sums);
    for (int k = 0; k < 5; ++k) {
      CHECK(std::fabs(sums[k] - ref[k]) <= 1e-12 * std::max(1.0, std::fabs(ref[k])));
    }
  }
}

TEST_CASE("empty input yields zero sums") {
  double sums[3] = {99.0, 99.0, 99.0};
  kern::power_sums(nullptr, 0, 3, sums);
  CHECK(sums[0] == 0.0);
  CHECK(sums[1] == 0.0);
  CHECK(sums[2] == 0.0);
}

TEST_CASE("order bounds are enforced") {
  double x = 1.0;
  double sums[9];
  CHECK_THROWS_AS(kern::power_sums(&x, 1, 0, sums), std::invalid_argument);
  CHECK_THROWS_AS(kern::power_sums(&x, 1, 9, sums), std::invalid_argument);
  CHECK_THROWS_AS(kern::power_sums_scalar(&x, 1, -1, sums), std::invalid_argument);
}

TEST_CASE("cross power sums match a naive double loop") {
  const std::size_t n = 1000;
  const auto x = random_values(43, n, -2.0, 2.0);
  const auto y = random_values(44, n, -2.0, 2.0);
  const int amax = 4;
  const int bmax = 4;
  std::vector<double> sums((amax + 1) * (bmax + 1));
  kern::cross_power_sums(x.data(), y.data(), n, amax, bmax, sums.data());

  for (int a = 0; a <= amax; ++a) {
    for (int b = 0; b <= bmax; ++b) {
      long double acc = 0.0L;
      for (std::size_t i = 0; i < n; ++i) {
        acc += std::pow(static_cast<long double>(x[i]), a) *
               std::pow(static_cast<long double>(y[i]), b);
      }
      const double ref = static_cast<double>(acc);
      CAPTURE(a);
      CAPTURE(b);
      CHECK(std::fabs(sums[a * (bmax + 1) + b] - ref) <=
            1e-11 * std::max(1.0, std::fabs(ref)));
    }
  }
  // The (0, 0) slot counts the points.
  CHECK(sums[0] == doctest::Approx(static_cast<double>(n)));
}

TEST_CASE("backend report is consistent with cpu detection") {
  const std::string backend = kern::active_backend();
  if (kern::avx2_available()) {
    CHECK(backend == "avx2");
  } else {
    CHECK(backend == "scalar");
  }
}

}  // TEST_SUITE
