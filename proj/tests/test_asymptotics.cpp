#include <cmath>
#include <vector>

#include "doctest.h"
#include "dualmix/asymptotics.hpp"
#include "dualmix/divergence.hpp"
#include "dualmix/estimator.hpp"
#include "dualmix/montecarlo.hpp"
#include "support/jacobi.hpp"

using dualmix::ConstraintSet;
using dualmix::Dataset;
using dualmix::Family;
using dualmix::Mat;
using dualmix::MixtureParams;
using dualmix::MixtureTruth;
using dualmix::SampleStats;
using dualmix::Vec;

namespace {

MixtureTruth weibull_truth() {
  return {0.7, Family::weibull(0.5), {2.0}, Family::weibull(1.0), {1.0}};
}

// The dual gradient at xi = 0 is m(alpha) - b(phi); its phi-Jacobian is what
// j_phi_xi computes analytically. Differencing m - b gives an oracle that
// never touches the quadrature path.
Mat jacobian_by_differences(const MixtureParams& phi, const SampleStats& stats,
                            const Family& fam, const ConstraintSet& cs) {
  const int q = cs.q();
  const int p = 1 + fam.theta_dim() + cs.alpha_dim();
  auto residual = [&](const MixtureParams& at) {
    const Vec m = cs.eval_m(at.alpha);
    const Vec b = dualmix::dual_target(at, stats, fam, cs);
    Vec r(q);
    for (int i = 0; i < q; ++i) r[i] = m[i] - b[i];
    return r;
  };
  Mat out(q, p);
  const double h = 1e-6;
  for (int k = 0; k < p; ++k) {
    MixtureParams up = phi;
    MixtureParams dn = phi;
    double* u = nullptr;
    double* d = nullptr;
    if (k == 0) {
      u = &up.lambda;
      d = &dn.lambda;
    } else if (k - 1 < fam.theta_dim()) {
      u = &up.theta[k - 1];
      d = &dn.theta[k - 1];
    } else {
      u = &up.alpha[k - 1 - fam.theta_dim()];
      d = &dn.alpha[k - 1 - fam.theta_dim()];
    }
    *u += h;
    *d -= h;
    const Vec ru = residual(up);
    const Vec rd = residual(dn);
    for (int i = 0; i < q; ++i) out(i, k) = (ru[i] - rd[i]) / (2.0 * h);
  }
  return out;
}

double max_abs(const Mat& m) {
  double v = 0.0;
  for (double x : m.a) v = std::max(v, std::fabs(x));
  return v;
}

}  // namespace

TEST_SUITE("asymptotics") {

TEST_CASE("jacobian blocks have their hand-derived values for the line scenario") {
  // Mixture of a unit gaussian centered on the line (t, t - 1) at t = 0 with
  // a gaussian at (3, 3), weight 0.7, constraints E[x] = E[y] = alpha and
  // E[xy] = alpha^2.
  const Family f1 = Family::bivariate_gaussian_line(1.0, 0.0, 0.0, -1.0, 1.0, 1.0);
  const Family f0 = Family::bivariate_gaussian_fixed(0.5, 0.0, 3.0, 3.0);
  const ConstraintSet cs = ConstraintSet::bivariate_mean_cross(0.0);
  const Vec theta1{0.0};
  const SampleStats pop = dualmix::population_stats(0.7, f1, theta1, f0, {}, cs);
  MixtureParams phi;
  phi.lambda = 0.7;
  phi.theta = {0.0};
  phi.alpha = {3.0};

  const Mat j = dualmix::j_phi_xi(phi, pop, f1, cs);
  REQUIRE(j.rows == 4);
  REQUIRE(j.cols == 3);

  // lambda column: (E_theta[g] - gbar) / (1 - lambda)^2.
  CHECK(j(0, 0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(j(1, 0) == doctest::Approx(-10.0).epsilon(1e-8));
  CHECK(j(2, 0) == doctest::Approx(-40.0 / 3.0).epsilon(1e-8));
  CHECK(j(3, 0) == doctest::Approx(-30.0).epsilon(1e-8));

  // theta column: lambda/(1-lambda) d/dtheta E_theta[g] with the mean moving
  // along (1, 1): derivatives (0, 1, 1, 2 theta - 1).
  CHECK(j(0, 1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-7));
  CHECK(j(1, 1) == doctest::Approx(7.0 / 3.0).epsilon(1e-7));
  CHECK(j(2, 1) == doctest::Approx(7.0 / 3.0).epsilon(1e-7));
  CHECK(j(3, 1) == doctest::Approx(-7.0 / 3.0).epsilon(1e-7));

  // alpha column: gradient of (1, a, a, a^2) targets.
  CHECK(j(0, 2) == 0.0);
  CHECK(j(1, 2) == doctest::Approx(1.0));
  CHECK(j(2, 2) == doctest::Approx(1.0));
  CHECK(j(3, 2) == doctest::Approx(6.0));
}

TEST_CASE("gaussian location column matches the moment derivatives") {
  // For a gaussian with free mean mu, d/dmu E[x^k] gives (0, 1, 2 mu).
  const Family f1 = Family::gaussian(0.5);
  const ConstraintSet cs = ConstraintSet::weibull_moments({1, 2}, 1.0);
  Dataset data;
  data.dim = 1;
  data.values = {0.2, 0.9, 1.7, 2.4, 3.1};
  const SampleStats st = dualmix::compute_stats(data, cs);
  MixtureParams phi;
  phi.lambda = 0.7;
  phi.theta = {0.3};
  phi.alpha = {1.5};
  const Mat j = dualmix::j_phi_xi(phi, st, f1, cs);
  const double w = 0.7 / 0.3;
  CHECK(j(0, 1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
  CHECK(j(1, 1) == doctest::Approx(w).epsilon(1e-8));
  CHECK(j(2, 1) == doctest::Approx(w * 2.0 * 0.3).epsilon(1e-7));
}

TEST_CASE("analytic jacobian matches finite differences of the dual gradient") {
  const MixtureTruth t = weibull_truth();
  const ConstraintSet cs = ConstraintSet::weibull_moments({1, 2, 3}, 1.0);
  const Dataset data = dualmix::sample_mixture(t, 800, 83);
  const SampleStats st = dualmix::compute_stats(data, cs);
  dualmix::CounterRng rng(89, 0);
  for (int rep = 0; rep < 8; ++rep) {
    MixtureParams phi;
    phi.lambda = 0.3 + 0.5 * rng.next_unit();
    phi.theta = {1.2 + 1.5 * rng.next_unit()};
    phi.alpha = {0.7 + 0.8 * rng.next_unit()};
    const Mat analytic = dualmix::j_phi_xi(phi, st, t.f1, cs);
    const Mat fd = jacobian_by_differences(phi, st, t.f1, cs);
    REQUIRE(analytic.rows == fd.rows);
    REQUIRE(analytic.cols == fd.cols);
    const double scale = std::max(1.0, max_abs(fd));
    for (int i = 0; i < analytic.rows; ++i)
      for (int k = 0; k < analytic.cols; ++k) {
        CHECK(analytic(i, k) == doctest::Approx(fd(i, k)).epsilon(2e-5).scale(scale));
      }
  }
}

TEST_CASE("the xi block is minus the dual quadratic form") {
  const MixtureTruth t = weibull_truth();
  const ConstraintSet cs = ConstraintSet::weibull_moments({1, 2, 3}, 1.0);
  const Dataset data = dualmix::sample_mixture(t, 500, 97);
  const SampleStats st = dualmix::compute_stats(data, cs);
  MixtureParams phi;
  phi.lambda = 0.6;
  phi.theta = {2.1};
  phi.alpha = {1.05};
  const Mat jxx = dualmix::j_xi_xi(phi, st, t.f1, cs);
  const dualmix::SymMat omega = dualmix::omega_n(phi, st, t.f1, cs);
  for (int i = 0; i < cs.q(); ++i)
    for (int j = 0; j < cs.q(); ++j) {
      CHECK(jxx(i, j) == doctest::Approx(-omega(i, j)).epsilon(1e-14));
    }
}

TEST_CASE("report blocks invert the bordered jacobian and annihilate j") {
  const MixtureTruth t = weibull_truth();
  const ConstraintSet cs = ConstraintSet::weibull_moments({1, 2, 3, 4}, 1.0);
  const Dataset data = dualmix::sample_mixture(t, 4000, 101);
  const SampleStats st = dualmix::compute_stats(data, cs);
  MixtureParams phi;
  phi.lambda = 0.7;
  phi.theta = {2.0};
  phi.alpha = {1.0};
  const auto rep = dualmix::asymptotic_report(phi, st, t.f1, cs);
  REQUIRE(rep.available);
  const int p = rep.p;
  const int q = rep.q;
  REQUIRE(p == 3);
  REQUIRE(q == 5);

  // Assemble J_H = [[0, J^T], [J, Jxx]] and its claimed inverse
  // [[-Sigma, H], [H^T, W]]; the product must be the identity.
  const int npq = p + q;
  Mat jh(npq, npq);
  Mat inv(npq, npq);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < q; ++j) jh(i, p + j) = rep.j_phi_xi(j, i);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < p; ++j) jh(p + i, j) = rep.j_phi_xi(i, j);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) jh(p + i, p + j) = rep.j_xi_xi(i, j);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) inv(i, j) = -rep.sigma(i, j);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < q; ++j) {
      inv(i, p + j) = rep.h_block(i, j);
      inv(p + j, i) = rep.h_block(i, j);
    }
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) inv(p + i, p + j) = rep.w_block(i, j);

  const Mat prod = dualmix::matmul(jh, inv);
  for (int i = 0; i < npq; ++i)
    for (int j = 0; j < npq; ++j) {
      CHECK(prod(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).scale(1.0).epsilon(1e-8));
    }

  // W J = 0: the dual block of the influence function kills the range of J.
  const Mat wj = dualmix::matmul(rep.w_block, rep.j_phi_xi);
  for (int i = 0; i < q; ++i)
    for (int k = 0; k < p; ++k) {
      CHECK(wj(i, k) == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
    }
}

TEST_CASE("sandwich covariance is symmetric positive semidefinite") {
  const MixtureTruth t = weibull_truth();
  const ConstraintSet cs = ConstraintSet::weibull_moments({1, 2, 3, 4}, 1.0);
  const Dataset data = dualmix::sample_mixture(t, 4000, 103);
  const SampleStats st = dualmix::compute_stats(data, cs);
  MixtureParams phi;
  phi.lambda = 0.7;
  phi.theta = {2.0};
  phi.alpha = {1.0};
  const auto rep = dualmix::asymptotic_report(phi, st, t.f1, cs);
  REQUIRE(rep.available);
  const int npq = rep.p + rep.q;
  REQUIRE(rep.sandwich.rows == npq);
  REQUIRE(rep.sandwich.cols == npq);
  double scale = 0.0;
  for (int i = 0; i < npq; ++i)
    for (int j = 0; j < npq; ++j) {
      CHECK(rep.sandwich(i, j) ==
            doctest::Approx(rep.sandwich(j, i)).scale(1.0).epsilon(1e-9));
      scale = std::max(scale, std::fabs(rep.sandwich(i, j)));
    }
  const double min_eig = testsupport::min_eigenvalue(rep.sandwich.a, npq);
  CHECK(min_eig >= -1e-8 * scale);

  REQUIRE(rep.se.size() == static_cast<std::size_t>(rep.p));
  for (int k = 0; k < rep.p; ++k) {
    CHECK(std::isfinite(rep.se[k]));
    CHECK(rep.se[k] >= 0.0);
    // se = sqrt(S_kk / n) ties the two report fields together.
    CHECK(rep.se[k] ==
          doctest::Approx(std::sqrt(rep.sandwich(k, k) / 4000.0)).epsilon(1e-12));
  }
}

TEST_CASE("population statistics yield a report without standard errors") {
  const MixtureTruth t = weibull_truth();
  const ConstraintSet cs = ConstraintSet::weibull_moments({1, 2, 3}, 1.0);
  const SampleStats pop =
      dualmix::population_stats(t.lambda, t.f1, t.theta1, t.f0, t.theta0, cs);
  MixtureParams phi;
  phi.lambda = 0.7;
  phi.theta = {2.0};
  phi.alpha = {1.0};
  const auto rep = dualmix::asymptotic_report(phi, pop, t.f1, cs);
  REQUIRE(rep.available);
  CHECK(rep.se.empty());
  CHECK(rep.sigma.rows == rep.p);
}

TEST_CASE("underdetermined systems are reported unavailable with a note") {
  const MixtureTruth t = weibull_truth();
  // One substantive constraint against three parameters: q = 2 < p = 3.
  const ConstraintSet cs = ConstraintSet::weibull_moments({1}, 1.0);
  const Dataset data = dualmix::sample_mixture(t, 200, 107);
  const SampleStats st = dualmix::compute_stats(data, cs);
  MixtureParams phi;
  phi.lambda = 0.7;
  phi.theta = {2.0};
  phi.alpha = {1.0};
  const auto rep = dualmix::asymptotic_report(phi, st, t.f1, cs);
  CHECK(!rep.available);
  CHECK(!rep.note.empty());
}

TEST_CASE("an infeasible point is reported unavailable rather than throwing") {
  const MixtureTruth t = weibull_truth();
  const ConstraintSet cs = ConstraintSet::weibull_moments({1, 2}, 1.0);
  Dataset degenerate;
  degenerate.dim = 1;
  degenerate.values.assign(50, 2.0);  // rank-one moment matrix
  const SampleStats st = dualmix::compute_stats(degenerate, cs);
  MixtureParams phi;
  phi.lambda = 0.5;
  phi.theta = {2.0};
  phi.alpha = {1.0};
  const auto rep = dualmix::asymptotic_report(phi, st, t.f1, cs);
  CHECK(!rep.available);
  CHECK(!rep.note.empty());
}

}  // TEST_SUITE
