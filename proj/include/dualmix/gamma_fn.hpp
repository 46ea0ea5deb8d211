#pragma once

namespace dualmix {

// Gamma function for real arguments via the Lanczos approximation (g = 7,
// 9 terms), accurate to roughly 1e-13 relative over the range used here.
// Overflows to +inf for large arguments instead of throwing.
double gamma_fn(double z);

// log |Gamma(z)|, stable for large z where gamma_fn would overflow.
double log_gamma(double z);

// Digamma psi0(z) = d/dz log Gamma(z), from the analytic derivative of the
// same Lanczos series plus the reflection formula for z < 0.5.
double digamma(double z);

}  // namespace dualmix
