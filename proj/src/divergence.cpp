#include "dualmix/divergence.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dualmix {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

PsiEval psi_inf() { return {kInf, kInf, kInf}; }
}  // namespace

Divergence Divergence::from_name(const std::string& name) {
  if (name == "chi2") return chi2();
  if (name == "kl") return kl();
  if (name == "mkl") return modified_kl();
  if (name == "hellinger") return hellinger();
  if (name == "neyman_chi2") return neyman_chi2();
  throw std::invalid_argument("unknown divergence name: " + name);
}

bool Divergence::has_conjugate() const {
  return gamma_ == 2.0 || gamma_ == 1.0 || gamma_ == 0.5 || gamma_ == 0.0 ||
         gamma_ == -2.0;
}

std::string Divergence::name() const {
  if (gamma_ == 2.0) return "chi2";
  if (gamma_ == 1.0) return "kl";
  if (gamma_ == 0.0) return "mkl";
  if (gamma_ == 0.5) return "hellinger";
  if (gamma_ == -2.0) return "neyman_chi2";
  return "cressie_read(" + std::to_string(gamma_) + ")";
}

double Divergence::phi(double x) const {
  if (std::isnan(x)) return kInf;
  if (gamma_ == 2.0) {
    const double d = x - 1.0;
    return 0.5 * d * d;
  }
  if (gamma_ == 1.0) {
    if (x < 0.0) return kInf;
    if (x == 0.0) return 1.0;
    return x * std::log(x) - x + 1.0;
  }
  if (gamma_ == 0.0) {
    if (x <= 0.0) return kInf;
    return -std::log(x) + x - 1.0;
  }
  if (x < 0.0) return kInf;
  if (x == 0.0) {
    // x^gamma -> 0 for gamma > 0, diverges for gamma < 0.
    return gamma_ > 0.0 ? 1.0 / gamma_ : kInf;
  }
  return (std::pow(x, gamma_) - gamma_ * x + gamma_ - 1.0) / (gamma_ * (gamma_ - 1.0));
}

PsiEval Divergence::psi(double t) const {
  if (std::isnan(t)) return psi_inf();
  if (gamma_ == 2.0) {
    return {0.5 * t * t + t, t + 1.0, 1.0};
  }
  if (gamma_ == 1.0) {
    const double e = std::exp(t);
    return {e - 1.0, e, e};
  }
  if (gamma_ == 0.0) {
    if (t >= 1.0) return psi_inf();
    const double u = 1.0 - t;
    return {-std::log(u), 1.0 / u, 1.0 / (u * u)};
  }
  if (gamma_ == 0.5) {
    if (t >= 2.0) return psi_inf();
    const double u = 2.0 - t;
    return {2.0 * t / u, 4.0 / (u * u), 8.0 / (u * u * u)};
  }
  if (gamma_ == -2.0) {
    if (t >= 1.0 / 3.0) return psi_inf();
    const double u = 1.0 - 3.0 * t;
    const double c = std::cbrt(u);
    return {0.5 * (1.0 - c * c), 1.0 / c, 1.0 / (c * c * c * c)};
  }
  throw std::logic_error("no closed-form conjugate for gamma = " + std::to_string(gamma_));
}

double Divergence::psi_domain_sup() const {
  if (gamma_ == 2.0 || gamma_ == 1.0) return kInf;
  if (gamma_ == 0.0) return 1.0;
  if (gamma_ == 0.5) return 2.0;
  if (gamma_ == -2.0) return 1.0 / 3.0;
  throw std::logic_error("no closed-form conjugate for gamma = " + std::to_string(gamma_));
}

}  // namespace dualmix
