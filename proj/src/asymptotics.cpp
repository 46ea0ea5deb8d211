#include "dualmix/asymptotics.hpp"

#include <cmath>

#include "dualmix/quadrature.hpp"

namespace dualmix {

namespace {
constexpr double kThetaIntegralTol = 1e-8;

// integral of g_i * d p1 / d theta_k over the support, one (i, k) pair.
double theta_column_entry(const MixtureParams& phi, const Family& fam,
                          const ConstraintSet& cs, int gi, int k) {
  if (fam.dim() == 1) {
    const auto [lo, hi] = fam.integration_range(phi.theta, 0);
    return integrate(
        [&](double x) {
          const double pt[1] = {x};
          const std::span<const double> xs(pt, 1);
          return cs.eval_g(xs)[gi] * fam.density_grad_theta(phi.theta, xs)[k];
        },
        lo, hi, kThetaIntegralTol);
  }
  const auto [lox, hix] = fam.integration_range(phi.theta, 0);
  const auto [loy, hiy] = fam.integration_range(phi.theta, 1);
  return integrate_2d(
      [&](double x, double y) {
        const double pt[2] = {x, y};
        const std::span<const double> xs(pt, 2);
        return cs.eval_g(xs)[gi] * fam.density_grad_theta(phi.theta, xs)[k];
      },
      lox, hix, loy, hiy, 1e-7);
}

}  // namespace

Mat j_phi_xi(const MixtureParams& phi, const SampleStats& stats, const Family& fam,
             const ConstraintSet& cs) {
  const int q = cs.q();
  const int d = fam.theta_dim();
  const int s = cs.alpha_dim();
  Mat j(q, 1 + d + s);

  const double om = 1.0 - phi.lambda;
  const Vec m1 = param_moment_vec(fam, phi.theta, cs);
  for (int i = 0; i < q; ++i) {
    j(i, 0) = (m1[i] - stats.gbar[i]) / (om * om);
  }
  const double w_par = phi.lambda / om;
  for (int k = 0; k < d; ++k) {
    for (int i = 0; i < q; ++i) {
      j(i, 1 + k) = w_par * theta_column_entry(phi, fam, cs, i, k);
    }
  }
  if (s > 0) {
    const Mat gm = cs.eval_grad_m(phi.alpha);
    for (int i = 0; i < q; ++i)
      for (int k = 0; k < s; ++k) j(i, 1 + d + k) = gm(i, k);
  }
  return j;
}

Mat j_xi_xi(const MixtureParams& phi, const SampleStats& stats, const Family& fam,
            const ConstraintSet& cs) {
  const Mat omega = omega_n(phi, stats, fam, cs).full();
  Mat j(omega.rows, omega.cols);
  for (std::size_t i = 0; i < omega.a.size(); ++i) j.a[i] = -omega.a[i];
  return j;
}

namespace {

// Symmetric inverse that tolerates the 1x1 case (SymMat starts at order 2).
Mat invert_sym_any(const Mat& m) {
  if (m.rows == 1) {
    if (std::fabs(m(0, 0)) <= 1e-300) {
      throw SingularMatrixError(0, "singular 1x1 system");
    }
    Mat inv(1, 1);
    inv(0, 0) = 1.0 / m(0, 0);
    return inv;
  }
  return invert(SymMat::from(m)).full();
}

}  // namespace

AsymptoticReport asymptotic_report(const MixtureParams& phi_hat,
                                   const SampleStats& stats, const Family& fam,
                                   const ConstraintSet& cs) {
  AsymptoticReport rep;
  rep.q = cs.q();
  rep.p = 1 + fam.theta_dim() + cs.alpha_dim();
  if (rep.q < rep.p) {
    rep.note = "asymptotics unavailable: fewer dual equations than parameters";
    return rep;
  }
  try {
    rep.j_phi_xi = j_phi_xi(phi_hat, stats, fam, cs);
    rep.j_xi_xi = j_xi_xi(phi_hat, stats, fam, cs);

    const Mat jxx_inv = [&] {
      Mat inv = invert(SymMat::from(rep.j_xi_xi)).full();
      return inv;
    }();
    const Mat jt = transpose(rep.j_phi_xi);

    // Sigma = (J^T Jxx^-1 J)^-1 (p x p, negative definite since Jxx is).
    const Mat inner = matmul(jt, matmul(jxx_inv, rep.j_phi_xi));
    rep.sigma = invert_sym_any(inner);

    // H = Sigma J^T Jxx^-1 (p x q).
    rep.h_block = matmul(rep.sigma, matmul(jt, jxx_inv));

    // W = Jxx^-1 - Jxx^-1 J Sigma J^T Jxx^-1 (q x q, annihilates J).
    const Mat corr = matmul(matmul(jxx_inv, rep.j_phi_xi),
                            matmul(rep.sigma, matmul(jt, jxx_inv)));
    rep.w_block = Mat(rep.q, rep.q);
    for (std::size_t i = 0; i < rep.w_block.a.size(); ++i) {
      rep.w_block.a[i] = jxx_inv.a[i] - corr.a[i];
    }

    // Var(g) estimated by gg - gbar gbar^T (row/column 0 vanish since the
    // mass coordinate is constant).
    Mat var_g(rep.q, rep.q);
    for (int i = 0; i < rep.q; ++i)
      for (int j = 0; j < rep.q; ++j)
        var_g(i, j) = stats.gg(i, j) - stats.gbar[i] * stats.gbar[j];

    // Stack B = [H; W] and form the sandwich B Var(g) B^T / (1 - lambda)^2.
    Mat b(rep.p + rep.q, rep.q);
    for (int i = 0; i < rep.p; ++i)
      for (int j = 0; j < rep.q; ++j) b(i, j) = rep.h_block(i, j);
    for (int i = 0; i < rep.q; ++i)
      for (int j = 0; j < rep.q; ++j) b(rep.p + i, j) = rep.w_block(i, j);
    rep.sandwich = matmul(b, matmul(var_g, transpose(b)));
    const double om = 1.0 - phi_hat.lambda;
    for (double& v : rep.sandwich.a) v /= om * om;

    if (stats.n > 0) {
      rep.se.resize(rep.p);
      for (int k = 0; k < rep.p; ++k) {
        const double v = rep.sandwich(k, k);
        rep.se[k] = v > 0.0 ? std::sqrt(v / static_cast<double>(stats.n)) : 0.0;
      }
    }
    rep.available = true;
    rep.note =
        "plug-in covariance at the estimate; xi-block distribution theory "
        "is heuristic";
  } catch (const SingularMatrixError& e) {
    rep.available = false;
    rep.note = std::string("asymptotics unavailable: ") + e.what();
  }
  return rep;
}

}  // namespace dualmix
