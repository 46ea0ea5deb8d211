#pragma once

#include <string>

namespace dualmix {

// Value and first two derivatives of the convex conjugate at one point.
struct PsiEval {
  double value;
  double d1;
  double d2;
};

// A member of the Cressie-Read power divergence family
//
//   phi_gamma(x) = (x^gamma - gamma x + gamma - 1) / (gamma (gamma - 1)),
//
// with the limiting cases gamma = 0 (modified KL, -log x + x - 1) and
// gamma = 1 (KL, x log x - x + 1). Points outside the effective domain
// evaluate to +inf rather than throwing, so optimizers can reject them.
//
// The Legendre conjugate psi_gamma (with psi(0) = 0, psi'(0) = psi''(0) = 1)
// is available in closed form for gamma in {-2, 0, 1/2, 1, 2}:
//
//   gamma = 2    psi(t) = t^2/2 + t                     t in R
//   gamma = 1    psi(t) = e^t - 1                       t in R
//   gamma = 1/2  psi(t) = 2t / (2 - t)                  t < 2
//   gamma = 0    psi(t) = -log(1 - t)                   t < 1
//   gamma = -2   psi(t) = (1 - (1 - 3t)^(2/3)) / 2      t < 1/3
//
// Conjugate evaluations past the domain edge return +inf in all three slots.
class Divergence {
 public:
  static Divergence chi2() { return Divergence(2.0); }
  static Divergence kl() { return Divergence(1.0); }
  static Divergence modified_kl() { return Divergence(0.0); }
  static Divergence hellinger() { return Divergence(0.5); }
  static Divergence neyman_chi2() { return Divergence(-2.0); }
  // Arbitrary exponent; phi is always available, the conjugate only for the
  // five exponents listed above (psi throws otherwise).
  static Divergence cressie_read(double gamma) { return Divergence(gamma); }

  // Parse the CLI/config spelling ("chi2", "kl", "mkl", "hellinger",
  // "neyman_chi2"); throws std::invalid_argument on anything else.
  static Divergence from_name(const std::string& name);

  double gamma() const { return gamma_; }
  bool is_chi2() const { return gamma_ == 2.0; }
  bool has_conjugate() const;
  std::string name() const;

  double phi(double x) const;

  // Conjugate value and derivatives; throws std::logic_error when no closed
  // form exists for this exponent.
  PsiEval psi(double t) const;

  // Upper edge of the conjugate's domain (+inf when unbounded).
  double psi_domain_sup() const;

 private:
  explicit Divergence(double gamma) : gamma_(gamma) {}

  double gamma_;
};

}  // namespace dualmix
