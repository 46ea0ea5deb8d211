#pragma once

#include <string>

#include "dualmix/constraints.hpp"
#include "dualmix/estimator.hpp"
#include "dualmix/families.hpp"
#include "dualmix/smallmat.hpp"

namespace dualmix {

// Plug-in asymptotic covariance report for the joint solution (phi, xi) of
// the dual estimating system. Built from the two Jacobian blocks
//
//   J_phi_xi = d^2 H_n / dphi dxi   (q x p, evaluated in the xi -> 0 limit)
//   J_xi_xi  = d^2 H_n / dxi dxi  = -Omega_n(phi),
//
// inverted blockwise as J_H = [[0, J^T], [J, J_xi_xi]],
// J_H^-1 = [[-Sigma, H], [H^T, W]] with
//
//   Sigma = (J^T J_xi_xi^-1 J)^-1,  H = Sigma J^T J_xi_xi^-1,
//   W = J_xi_xi^-1 - J_xi_xi^-1 J Sigma J^T J_xi_xi^-1   (so W J = 0),
//
// and the sandwich covariance  S = [H; W] Var(g) [H; W]^T / (1 - lambda)^2
// with Var(g) estimated by the sample covariance of g. Standard errors for
// the phi block are sqrt(S_kk / n).
struct AsymptoticReport {
  bool available = false;
  std::string note;  // reason when unavailable, caveats otherwise

  int p = 0;  // parameter block size 1 + d + s
  int q = 0;  // dual block size ell + 1
  Mat j_phi_xi;   // q x p
  Mat j_xi_xi;    // q x q (equals -Omega_n at the estimate)
  Mat sigma;      // p x p, the Sigma block above
  Mat h_block;    // p x q
  Mat w_block;    // q x q
  Mat sandwich;   // (p + q) x (p + q)
  Vec se;         // p entries; empty for population statistics (n == 0)
};

// Jacobian of the dual gradient with respect to phi, columns ordered
// (lambda, theta..., alpha...):
//   lambda column  (E_theta[g] - gbar) / (1 - lambda)^2,
//   theta columns  lambda/(1 - lambda) * integral of g grad_theta p1,
//   alpha columns  grad m(alpha).
Mat j_phi_xi(const MixtureParams& phi, const SampleStats& stats, const Family& fam,
             const ConstraintSet& cs);

// -Omega_n(phi) as a full matrix.
Mat j_xi_xi(const MixtureParams& phi, const SampleStats& stats, const Family& fam,
            const ConstraintSet& cs);

// Assembles the full report at the estimate. Reports unavailable (with a
// note) when the system is rank-deficient, q < p, or a block inversion fails.
AsymptoticReport asymptotic_report(const MixtureParams& phi_hat,
                                   const SampleStats& stats, const Family& fam,
                                   const ConstraintSet& cs);

}  // namespace dualmix
