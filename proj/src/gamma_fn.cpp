#include "dualmix/gamma_fn.hpp"

#include <cmath>
#include <limits>

namespace dualmix {

namespace {

// Lanczos coefficients for g = 7, n = 9 (Godfrey's tabulation).
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

constexpr double kSqrtTwoPi = 2.5066282746310005024;
constexpr double kLogSqrtTwoPi = 0.91893853320467274178;
constexpr double kPi = 3.14159265358979323846;

double lanczos_sum(double w) {
  double a = kLanczos[0];
  for (int i = 1; i < 9; ++i) a += kLanczos[i] / (w + i);
  return a;
}

double lanczos_sum_deriv(double w) {
  double a = 0.0;
  for (int i = 1; i < 9; ++i) a -= kLanczos[i] / ((w + i) * (w + i));
  return a;
}

}  // namespace

double gamma_fn(double z) {
  if (std::isnan(z)) return z;
  if (z < 0.5) {
    // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z). Poles at z = 0, -1, ...
    const double s = std::sin(kPi * z);
    if (s == 0.0) return std::numeric_limits<double>::infinity();
    return kPi / (s * gamma_fn(1.0 - z));
  }
  // Switch to the log form well before t^(w+1/2) overflows.
  if (z > 140.0) return std::exp(log_gamma(z));
  const double w = z - 1.0;
  const double t = w + 7.5;
  return kSqrtTwoPi * std::pow(t, w + 0.5) * std::exp(-t) * lanczos_sum(w);
}

double log_gamma(double z) {
  if (std::isnan(z)) return z;
  if (z < 0.5) {
    const double s = std::fabs(std::sin(kPi * z));
    if (s == 0.0) return std::numeric_limits<double>::infinity();
    return std::log(kPi / s) - log_gamma(1.0 - z);
  }
  const double w = z - 1.0;
  const double t = w + 7.5;
  return kLogSqrtTwoPi + (w + 0.5) * std::log(t) - t + std::log(lanczos_sum(w));
}

double digamma(double z) {
  if (std::isnan(z)) return z;
  if (z < 0.5) {
    // psi(z) = psi(1 - z) - pi cot(pi z)
    return digamma(1.0 - z) - kPi / std::tan(kPi * z);
  }
  const double w = z - 1.0;
  const double t = w + 7.5;
  return std::log(t) + (w + 0.5) / t - 1.0 + lanczos_sum_deriv(w) / lanczos_sum(w);
}

}  // namespace dualmix
