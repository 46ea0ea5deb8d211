#include "dualmix/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dualmix/kernels.hpp"
#include "dualmix/quadrature.hpp"

namespace dualmix {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kIntegralTol = 1e-10;

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !(lambda < 1.0)) {
    throw std::invalid_argument("lambda must lie strictly inside (0, 1)");
  }
}
}  // namespace

Vec MixtureParams::flatten() const {
  Vec x;
  x.reserve(1 + theta.size() + alpha.size());
  x.push_back(lambda);
  x.insert(x.end(), theta.begin(), theta.end());
  x.insert(x.end(), alpha.begin(), alpha.end());
  return x;
}

MixtureParams MixtureParams::unflatten(std::span<const double> x, int theta_dim,
                                       int alpha_dim) {
  if (static_cast<int>(x.size()) != 1 + theta_dim + alpha_dim) {
    throw std::invalid_argument("flattened parameter size mismatch");
  }
  MixtureParams p;
  p.lambda = x[0];
  p.theta.assign(x.begin() + 1, x.begin() + 1 + theta_dim);
  p.alpha.assign(x.begin() + 1 + theta_dim, x.end());
  return p;
}

SampleStats compute_stats(const Dataset& data, const ConstraintSet& cs,
                          bool keep_sample) {
  if (data.size() == 0) throw std::invalid_argument("empty sample");
  if (data.dim != cs.point_dim()) {
    throw std::invalid_argument("sample dimension does not match constraint set");
  }
  const int q = cs.q();
  const auto& exps = cs.exponents();
  SampleStats st(q);
  st.n = data.size();
  const double n = static_cast<double>(st.n);

  if (data.dim == 1) {
    const int maxk = 2 * cs.max_order(0);
    double sums[2 * kernels::kMaxPowerOrder] = {0.0};
    kernels::power_sums(data.values.data(), data.size(), maxk, sums);
    auto mean_pow = [&](int k) { return k == 0 ? 1.0 : sums[k - 1] / n; };
    st.gbar[0] = 1.0;
    for (int i = 0; i < cs.ell(); ++i) st.gbar[i + 1] = mean_pow(exps[i][0]);
    for (int i = 0; i < q; ++i) {
      const int ei = (i == 0) ? 0 : exps[i - 1][0];
      for (int j = i; j < q; ++j) {
        const int ej = (j == 0) ? 0 : exps[j - 1][0];
        st.gg.set(i, j, mean_pow(ei + ej));
      }
    }
  } else {
    const int amax = 2 * cs.max_order(0);
    const int bmax = 2 * cs.max_order(1);
    const std::vector<double> xs = data.column(0);
    const std::vector<double> ys = data.column(1);
    std::vector<double> sums(static_cast<std::size_t>(amax + 1) * (bmax + 1));
    kernels::cross_power_sums(xs.data(), ys.data(), data.size(), amax, bmax,
                              sums.data());
    auto mean_pow = [&](int a, int b) { return sums[a * (bmax + 1) + b] / n; };
    st.gbar[0] = 1.0;
    for (int i = 0; i < cs.ell(); ++i) st.gbar[i + 1] = mean_pow(exps[i][0], exps[i][1]);
    for (int i = 0; i < q; ++i) {
      const int ai = (i == 0) ? 0 : exps[i - 1][0];
      const int bi = (i == 0) ? 0 : exps[i - 1][1];
      for (int j = i; j < q; ++j) {
        const int aj = (j == 0) ? 0 : exps[j - 1][0];
        const int bj = (j == 0) ? 0 : exps[j - 1][1];
        st.gg.set(i, j, mean_pow(ai + aj, bi + bj));
      }
    }
  }
  if (keep_sample) st.sample = std::make_shared<Dataset>(data);
  return st;
}

SampleStats population_stats(double lambda, const Family& f1,
                             std::span<const double> theta1, const Family& f0,
                             std::span<const double> theta0, const ConstraintSet& cs) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("mixture weight must lie in [0, 1]");
  }
  if (f1.dim() != cs.point_dim() || f0.dim() != cs.point_dim()) {
    throw std::invalid_argument("family dimension does not match constraint set");
  }
  const int q = cs.q();
  const auto& exps = cs.exponents();
  auto mix_moment = [&](int a, int b) {
    return lambda * f1.mixed_moment(theta1, a, b) +
           (1.0 - lambda) * f0.mixed_moment(theta0, a, b);
  };
  SampleStats st(q);
  st.n = 0;
  st.gbar[0] = 1.0;
  for (int i = 0; i < cs.ell(); ++i) st.gbar[i + 1] = mix_moment(exps[i][0], exps[i][1]);
  for (int i = 0; i < q; ++i) {
    const int ai = (i == 0) ? 0 : exps[i - 1][0];
    const int bi = (i == 0) ? 0 : exps[i - 1][1];
    for (int j = i; j < q; ++j) {
      const int aj = (j == 0) ? 0 : exps[j - 1][0];
      const int bj = (j == 0) ? 0 : exps[j - 1][1];
      st.gg.set(i, j, mix_moment(ai + aj, bi + bj));
    }
  }
  return st;
}

Vec param_moment_vec(const Family& fam, std::span<const double> theta,
                     const ConstraintSet& cs) {
  const auto& exps = cs.exponents();
  Vec m(cs.q());
  m[0] = 1.0;
  for (int i = 0; i < cs.ell(); ++i) {
    m[i + 1] = fam.mixed_moment(theta, exps[i][0], exps[i][1]);
  }
  return m;
}

SymMat param_gram(const Family& fam, std::span<const double> theta,
                  const ConstraintSet& cs) {
  const int q = cs.q();
  const auto& exps = cs.exponents();
  SymMat g(q);
  for (int i = 0; i < q; ++i) {
    const int ai = (i == 0) ? 0 : exps[i - 1][0];
    const int bi = (i == 0) ? 0 : exps[i - 1][1];
    for (int j = i; j < q; ++j) {
      const int aj = (j == 0) ? 0 : exps[j - 1][0];
      const int bj = (j == 0) ? 0 : exps[j - 1][1];
      g.set(i, j, fam.mixed_moment(theta, ai + aj, bi + bj));
    }
  }
  return g;
}

SymMat omega_n(const MixtureParams& phi, const SampleStats& stats, const Family& fam,
               const ConstraintSet& cs) {
  check_lambda(phi.lambda);
  const double w_emp = 1.0 / (1.0 - phi.lambda);
  const double w_par = phi.lambda / (1.0 - phi.lambda);
  const SymMat g1 = param_gram(fam, phi.theta, cs);
  const int q = cs.q();
  SymMat omega(q);
  for (int i = 0; i < q; ++i)
    for (int j = i; j < q; ++j) {
      omega.set(i, j, w_emp * stats.gg(i, j) - w_par * g1(i, j));
    }
  return omega;
}

Vec dual_target(const MixtureParams& phi, const SampleStats& stats, const Family& fam,
                const ConstraintSet& cs) {
  check_lambda(phi.lambda);
  const double w_emp = 1.0 / (1.0 - phi.lambda);
  const double w_par = phi.lambda / (1.0 - phi.lambda);
  const Vec m1 = param_moment_vec(fam, phi.theta, cs);
  Vec b(cs.q());
  for (int i = 0; i < cs.q(); ++i) b[i] = w_emp * stats.gbar[i] - w_par * m1[i];
  return b;
}

InnerSolution xi_inner_chi2(const MixtureParams& phi, const SampleStats& stats,
                            const Family& fam, const ConstraintSet& cs) {
  InnerSolution sol;
  const SymMat omega = omega_n(phi, stats, fam, cs);
  if (!is_spd_sylvester(omega)) return sol;
  const Vec b = dual_target(phi, stats, fam, cs);
  const Vec m = cs.eval_m(phi.alpha);
  Vec r(cs.q());
  for (int i = 0; i < cs.q(); ++i) r[i] = m[i] - b[i];
  try {
    const SymMat inv = invert(omega);
    sol.xi = matvec(inv, r);
    sol.objective = 0.5 * dot(r, sol.xi);
    sol.feasible = true;
    sol.converged = true;
    sol.iterations = 1;
  } catch (const SingularMatrixError&) {
    // Passed the Sylvester gate but numerically singular: report infeasible.
  }
  return sol;
}

namespace {

// Accumulated sample and parametric-component contributions to H_n and its
// xi-derivatives at a fixed xi. `ok` is false when xi leaves the conjugate
// domain anywhere it matters.
struct DualTerms {
  bool ok = false;
  double value = 0.0;  // H_n(phi, xi)
  Vec grad;            // dH/dxi
  SymMat hess;         // d2H/dxi dxi
  DualTerms(int q) : grad(q, 0.0), hess(q) {}
};

DualTerms dual_terms(const MixtureParams& phi, std::span<const double> xi,
                     const SampleStats& stats, const Family& fam,
                     const ConstraintSet& cs, const Divergence& div,
                     bool with_derivs) {
  const int q = cs.q();
  DualTerms out(q);
  const double w_emp = 1.0 / (1.0 - phi.lambda);
  const double w_par = phi.lambda / (1.0 - phi.lambda);
  const Vec m = cs.eval_m(phi.alpha);

  if (div.is_chi2()) {
    // psi(t) = t^2/2 + t makes every term a moment of (gbar, gg); no sample
    // traversal or quadrature needed.
    const Vec b = dual_target(phi, stats, fam, cs);
    const SymMat omega = omega_n(phi, stats, fam, cs);
    const Vec ox = matvec(omega, Vec(xi.begin(), xi.end()));
    out.value = 0.0;
    for (int i = 0; i < q; ++i) out.value += xi[i] * (m[i] - b[i]) - 0.5 * xi[i] * ox[i];
    if (with_derivs) {
      for (int i = 0; i < q; ++i) out.grad[i] = m[i] - b[i] - ox[i];
      for (int i = 0; i < q; ++i)
        for (int j = i; j < q; ++j) out.hess.set(i, j, -omega(i, j));
    }
    out.ok = std::isfinite(out.value);
    return out;
  }

  if (!stats.sample) {
    throw std::invalid_argument(
        "divergence " + div.name() +
        " needs the retained sample; rebuild stats with keep_sample = true");
  }
  if (fam.dim() != 1) {
    throw std::invalid_argument("divergence " + div.name() +
                                " supports univariate families only");
  }

  // Empirical part: averages of psi, g psi', g g^T psi'' over the sample.
  const Dataset& data = *stats.sample;
  const std::size_t n = data.size();
  double sum_psi = 0.0;
  Vec sum_g(q, 0.0);
  SymMat sum_gg(q);
  for (std::size_t idx = 0; idx < n; ++idx) {
    const Vec g = cs.eval_g(data.row(idx));
    double t = 0.0;
    for (int i = 0; i < q; ++i) t += xi[i] * g[i];
    const PsiEval p = div.psi(t);
    if (!std::isfinite(p.value)) return out;  // domain violation on a sample point
    sum_psi += p.value;
    if (with_derivs) {
      for (int i = 0; i < q; ++i) sum_g[i] += g[i] * p.d1;
      for (int i = 0; i < q; ++i)
        for (int j = i; j < q; ++j) sum_gg.set(i, j, sum_gg(i, j) + g[i] * g[j] * p.d2);
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);

  // Parametric part: the same three objects integrated against the
  // parametric density.
  const auto [lo, hi] = fam.integration_range(phi.theta);
  auto t_of = [&](double x) {
    const double pt[1] = {x};
    const Vec g = cs.eval_g(std::span<const double>(pt, 1));
    double t = 0.0;
    for (int i = 0; i < q; ++i) t += xi[i] * g[i];
    return t;
  };
  auto dens = [&](double x) {
    const double pt[1] = {x};
    return fam.density(phi.theta, std::span<const double>(pt, 1));
  };
  const double int_psi = integrate(
      [&](double x) { return div.psi(t_of(x)).value * dens(x); }, lo, hi, kIntegralTol);
  if (!std::isfinite(int_psi)) return out;

  out.value = -w_emp * sum_psi * inv_n + w_par * int_psi;
  for (int i = 0; i < q; ++i) out.value += xi[i] * m[i];
  if (!std::isfinite(out.value)) return out;

  if (with_derivs) {
    auto g_of = [&](double x, int i) {
      const double pt[1] = {x};
      return cs.eval_g(std::span<const double>(pt, 1))[i];
    };
    for (int i = 0; i < q; ++i) {
      const double gi = integrate(
          [&](double x) { return g_of(x, i) * div.psi(t_of(x)).d1 * dens(x); }, lo, hi,
          kIntegralTol);
      if (!std::isfinite(gi)) return out;
      out.grad[i] = m[i] - w_emp * sum_g[i] * inv_n + w_par * gi;
    }
    for (int i = 0; i < q; ++i) {
      for (int j = i; j < q; ++j) {
        const double hij = integrate(
            [&](double x) {
              return g_of(x, i) * g_of(x, j) * div.psi(t_of(x)).d2 * dens(x);
            },
            lo, hi, kIntegralTol);
        if (!std::isfinite(hij)) return out;
        out.hess.set(i, j, -w_emp * sum_gg(i, j) * inv_n + w_par * hij);
      }
    }
  }
  out.ok = true;
  return out;
}

}  // namespace

double h_n(const MixtureParams& phi, std::span<const double> xi,
           const SampleStats& stats, const Family& fam, const ConstraintSet& cs,
           const Divergence& div) {
  check_lambda(phi.lambda);
  if (static_cast<int>(xi.size()) != cs.q()) {
    throw std::invalid_argument("xi dimension must match the dual system");
  }
  const DualTerms t = dual_terms(phi, xi, stats, fam, cs, div, false);
  return t.ok ? t.value : -kInf;
}

InnerSolution xi_inner_generic(const MixtureParams& phi, const SampleStats& stats,
                               const Family& fam, const ConstraintSet& cs,
                               const Divergence& div, int max_iter, double grad_tol) {
  check_lambda(phi.lambda);
  InnerSolution sol;
  const int q = cs.q();

  // Same working-set gate as the closed form: the curvature at xi = 0 is
  // -Omega_n for every member of the family (psi''(0) = 1).
  const SymMat omega = omega_n(phi, stats, fam, cs);
  if (!is_spd_sylvester(omega)) return sol;
  sol.feasible = true;

  Vec xi(q, 0.0);
  DualTerms cur = dual_terms(phi, xi, stats, fam, cs, div, true);
  if (!cur.ok) {
    sol.feasible = false;
    return sol;
  }

  bool moved = false;
  for (int it = 0; it < max_iter; ++it) {
    sol.iterations = it + 1;
    double gmax = 0.0;
    for (double g : cur.grad) gmax = std::max(gmax, std::fabs(g));
    if (gmax <= grad_tol) {
      sol.converged = true;
      break;
    }

    // Newton direction on the concave dual: solve (-hess) d = grad. Fall
    // back to plain gradient ascent if the curvature check fails away from 0.
    Vec dir;
    SymMat neg(q);
    for (int i = 0; i < q; ++i)
      for (int j = i; j < q; ++j) neg.set(i, j, -cur.hess(i, j));
    bool have_newton = false;
    if (is_spd_sylvester(neg)) {
      try {
        dir = matvec(invert(neg), cur.grad);
        have_newton = true;
      } catch (const SingularMatrixError&) {
      }
    }
    if (!have_newton) {
      dir = cur.grad;
      double norm = 0.0;
      for (double d : dir) norm = std::max(norm, std::fabs(d));
      if (norm > 1.0) {
        for (double& d : dir) d /= norm;
      }
    }

    // Backtrack until the ascent actually improves H_n and stays inside the
    // conjugate domain. Trials are value-only; the derivative integrals are
    // recomputed once at the accepted point (and a derivative blow-up there
    // still rejects the step, as it would have before).
    double step = 1.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 45; ++halvings) {
      Vec trial(q);
      for (int i = 0; i < q; ++i) trial[i] = xi[i] + step * dir[i];
      DualTerms cand = dual_terms(phi, trial, stats, fam, cs, div, false);
      if (cand.ok && cand.value > cur.value) {
        DualTerms full = dual_terms(phi, trial, stats, fam, cs, div, true);
        if (full.ok) {
          xi = trial;
          cur = std::move(full);
          accepted = true;
          moved = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no admissible ascent step left
    // A value this large already certifies the candidate as far worse than
    // any genuine minimum; refining the lower bound further buys nothing for
    // the outer minimization and the near-boundary integrals are expensive.
    if (cur.value > 1e12) break;
  }
  sol.xi = xi;
  // Stuck at the origin with a non-vanishing gradient means the dual
  // landscape is numerically intractable at this phi (every trial step left
  // the conjugate domain or could not raise the value). H_n(phi, 0) = 0 is
  // only a lower bound on the sup there; reporting it would make the
  // candidate look perfect, so report a failure instead.
  sol.objective = (sol.converged || moved) ? cur.value
                                           : std::numeric_limits<double>::quiet_NaN();
  return sol;
}

double profiled_objective(const MixtureParams& phi, const SampleStats& stats,
                          const Family& fam, const ConstraintSet& cs,
                          const Divergence& div, double penalty) {
  if (!(phi.lambda > 0.0) || !(phi.lambda < 1.0)) return penalty;
  try {
    if (div.is_chi2()) {
      const InnerSolution sol = xi_inner_chi2(phi, stats, fam, cs);
      return (sol.feasible && std::isfinite(sol.objective)) ? sol.objective : penalty;
    }
    const InnerSolution sol = xi_inner_generic(phi, stats, fam, cs, div);
    return (sol.feasible && std::isfinite(sol.objective)) ? sol.objective : penalty;
  } catch (const SingularMatrixError&) {
    return penalty;
  }
}

Vec moment_system_residual(const MixtureParams& phi, const Vec& m_star,
                           const Family& fam, const ConstraintSet& cs) {
  check_lambda(phi.lambda);
  if (static_cast<int>(m_star.size()) != cs.q()) {
    throw std::invalid_argument("moment vector dimension must match the constraint set");
  }
  const double w_emp = 1.0 / (1.0 - phi.lambda);
  const double w_par = phi.lambda / (1.0 - phi.lambda);
  const Vec m1 = param_moment_vec(fam, phi.theta, cs);
  const Vec m = cs.eval_m(phi.alpha);
  Vec r(cs.q());
  for (int i = 0; i < cs.q(); ++i) {
    r[i] = w_emp * m_star[i] - w_par * m1[i] - m[i];
  }
  return r;
}

}  // namespace dualmix
