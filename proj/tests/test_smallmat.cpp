#include <cmath>
#include <vector>

#include "doctest.h"
#include "dualmix/rng.hpp"
#include "dualmix/smallmat.hpp"
#include "support/jacobi.hpp"

using dualmix::Mat;
using dualmix::SingularMatrixError;
using dualmix::SymMat;

namespace {

// Random symmetric matrix with entries in [-1, 1].
SymMat random_symmetric(dualmix::CounterRng& rng, int n) {
  SymMat m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m.set(i, j, -1.0 + 2.0 * rng.next_unit());
  return m;
}

// Random s.p.d. matrix built as G G^T + eps I.
SymMat random_spd(dualmix::CounterRng& rng, int n, double eps = 1e-3) {
  Mat g(n, n);
  for (double& v : g.a) v = -1.0 + 2.0 * rng.next_unit();
  SymMat m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += g(i, k) * g(j, k);
      m.set(i, j, s + (i == j ? eps : 0.0));
    }
  return m;
}

double inverse_residual(const SymMat& m, const SymMat& inv) {
  const Mat prod = matmul(m.full(), inv.full());
  double worst = 0.0;
  for (int i = 0; i < m.order(); ++i)
    for (int j = 0; j < m.order(); ++j) {
      const double target = i == j ? 1.0 : 0.0;
      worst = std::max(worst, std::fabs(prod(i, j) - target));
    }
  return worst;
}

}  // namespace

TEST_SUITE("smallmat") {

TEST_CASE("sylvester verdict matches the eigenvalue oracle on random matrices") {
  dualmix::CounterRng rng(31, 0);
  int positive_seen = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_unit() * 7.0);  // 2..8
    // Half the trials are generic symmetric, half are shifted to be s.p.d.
    SymMat m = trial % 2 == 0 ? random_symmetric(rng, n) : random_spd(rng, n);
    const double min_eig = testsupport::min_eigenvalue(m.full().a, n);
    // Skip knife-edge cases where the verdict legitimately depends on the
    // 1e-12 pivot tolerance.
    if (std::fabs(min_eig) < 1e-9) continue;
    CAPTURE(n);
    CAPTURE(min_eig);
    CHECK(dualmix::is_spd_sylvester(m) == (min_eig > 0.0));
    if (min_eig > 0.0) ++positive_seen;
  }
  CHECK(positive_seen >= 30);  // the shifted half guarantees coverage
}

TEST_CASE("sylvester rejects non-finite input") {
  SymMat m(3);
  m.set(0, 0, 1.0);
  m.set(1, 1, 1.0);
  m.set(2, 2, std::numeric_limits<double>::quiet_NaN());
  CHECK(!dualmix::is_spd_sylvester(m));
  m.set(2, 2, std::numeric_limits<double>::infinity());
  CHECK(!dualmix::is_spd_sylvester(m));
}

TEST_CASE("scale invariance of the sylvester verdict") {
  dualmix::CounterRng rng(32, 0);
  for (int trial = 0; trial < 20; ++trial) {
    SymMat m = random_spd(rng, 4, 1e-2);
    SymMat up(4);
    SymMat down(4);
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) {
        up.set(i, j, m(i, j) * 1e12);
        down.set(i, j, m(i, j) * 1e-12);
      }
    CHECK(dualmix::is_spd_sylvester(up));
    CHECK(dualmix::is_spd_sylvester(down));
  }
}

TEST_CASE("block inversion agrees with gauss-jordan on random spd systems") {
  dualmix::CounterRng rng(33, 0);
  for (int n : {4, 5}) {
    for (int trial = 0; trial < 50; ++trial) {
      const SymMat m = random_spd(rng, n, 1e-2);
      const SymMat a = dualmix::invert(m);
      const SymMat b = dualmix::invert_pivot(m);
      double scale = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, std::fabs(b(i, j)));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          CHECK(std::fabs(a(i, j) - b(i, j)) <= 1e-10 * std::max(1.0, scale));
        }
    }
  }
}

TEST_CASE("inverse residual is tight across all supported orders") {
  dualmix::CounterRng rng(34, 0);
  for (int n = 2; n <= 8; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      const SymMat m = random_spd(rng, n, 1e-2);
      CHECK(inverse_residual(m, dualmix::invert(m)) <= 1e-10);
    }
  }
}

TEST_CASE("inversion works for negative definite and indefinite matrices") {
  dualmix::CounterRng rng(35, 0);
  for (int n : {3, 4, 5}) {
    const SymMat m = random_spd(rng, n, 1e-2);
    SymMat neg(n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) neg.set(i, j, -m(i, j));
    CHECK(inverse_residual(neg, dualmix::invert(neg)) <= 1e-10);
  }
}

TEST_CASE("known 3x3 inverse") {
  SymMat m(3);
  m.set(0, 0, 4.0);
  m.set(0, 1, 1.0);
  m.set(0, 2, 0.0);
  m.set(1, 1, 3.0);
  m.set(1, 2, 1.0);
  m.set(2, 2, 2.0);
  const SymMat inv = dualmix::invert(m);
  // det = 4(6-1) - 1(2-0) = 18.
  CHECK(inv(0, 0) == doctest::Approx(5.0 / 18.0).epsilon(1e-12));
  CHECK(inv(0, 1) == doctest::Approx(-2.0 / 18.0).epsilon(1e-12));
  CHECK(inv(0, 2) == doctest::Approx(1.0 / 18.0).epsilon(1e-12));
  CHECK(inv(1, 1) == doctest::Approx(8.0 / 18.0).epsilon(1e-12));
  CHECK(inv(2, 2) == doctest::Approx(11.0 / 18.0).epsilon(1e-12));
}

TEST_CASE("singular input raises an error carrying the pivot index") {
  SymMat m(4);
  // Rank-1: outer product of (1, 2, 3, 4).
  const double v[4] = {1.0, 2.0, 3.0, 4.0};
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) m.set(i, j, v[i] * v[j]);
  CHECK_THROWS_AS(dualmix::invert(m), SingularMatrixError);
  CHECK_THROWS_AS(dualmix::invert_pivot(m), SingularMatrixError);
  try {
    dualmix::invert_pivot(m);
  } catch (const SingularMatrixError& e) {
    CHECK(e.pivot_index() >= 0);
    CHECK(e.pivot_index() < 4);
  }
}

TEST_CASE("symmetry is enforced when building from a full matrix") {
  Mat m(3, 3);
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  m(2, 2) = 1.0;
  m(0, 1) = 0.5;
  m(1, 0) = 0.5 + 1e-6;  // far beyond the 1e-12 relative gate
  CHECK_THROWS_AS(SymMat::from(m), std::invalid_argument);
  m(1, 0) = 0.5 + 1e-14;  // inside tolerance: averaged silently
  const SymMat s = SymMat::from(m);
  CHECK(s(0, 1) == s(1, 0));
}

TEST_CASE("order limits are enforced") {
  CHECK_THROWS_AS(SymMat(1), std::invalid_argument);
  CHECK_THROWS_AS(SymMat(9), std::invalid_argument);
}

TEST_CASE("general square inversion handles an indefinite jacobian block") {
  // [[0, J^T], [J, D]] with D negative definite is symmetric indefinite:
  // exactly the shape the pivoting path must handle.
  Mat m(3, 3);
  m(0, 0) = 0.0;
  m(0, 1) = 1.0;
  m(0, 2) = 2.0;
  m(1, 0) = 1.0;
  m(1, 1) = -2.0;
  m(1, 2) = 0.0;
  m(2, 0) = 2.0;
  m(2, 1) = 0.0;
  m(2, 2) = -3.0;
  const Mat inv = dualmix::invert_square(m);
  const Mat prod = matmul(m, inv);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      CHECK(prod(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("condition number is large for near-singular matrices") {
  SymMat good(2);
  good.set(0, 0, 2.0);
  good.set(1, 1, 1.0);
  good.set(0, 1, 0.0);
  CHECK(dualmix::cond_inf(good) == doctest::Approx(2.0));

  SymMat bad(2);
  bad.set(0, 0, 1.0);
  bad.set(0, 1, 1.0);
  bad.set(1, 1, 1.0 + 1e-11);
  CHECK(dualmix::cond_inf(bad) > 1e10);
}

TEST_CASE("matvec and dot basics") {
  Mat m(2, 3);
  m(0, 0) = 1.0;
  m(0, 1) = 2.0;
  m(0, 2) = 3.0;
  m(1, 0) = 4.0;
  m(1, 1) = 5.0;
  m(1, 2) = 6.0;
  const dualmix::Vec v{1.0, 1.0, 1.0};
  const auto out = matvec(m, v);
  CHECK(out[0] == 6.0);
  CHECK(out[1] == 15.0);
  CHECK(dualmix::dot({1.0, 2.0}, {3.0, 4.0}) == 11.0);
  CHECK_THROWS_AS(matvec(m, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(dualmix::dot({1.0}, {1.0, 2.0}), std::invalid_argument);
}

}  // TEST_SUITE
