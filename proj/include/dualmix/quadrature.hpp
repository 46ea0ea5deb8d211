#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

namespace dualmix {

namespace detail {

// Remaining integrand-evaluation allowance for one integrate() call; shared
// down the recursion so pathological integrands (poles, moving conjugate
// domain edges) terminate with the best available estimate instead of
// expanding the refinement tree without bound.
struct EvalBudget {
  long long left;
};

template <class F>
double simpson(const F& f, double a, double fa, double b, double fb, double m, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double adaptive_step(const F& f, double a, double fa, double b, double fb, double m,
                     double fm, double whole, double tol, int depth, int force_split,
                     EvalBudget& budget) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  budget.left -= 2;
  const double left = simpson(f, a, fa, m, fm, lm, flm);
  const double right = simpson(f, m, fm, b, fb, rm, frm);
  // A non-finite panel cannot be refined away (the integrand blew up or left
  // its domain somewhere inside); propagate it up instead of splitting the
  // panel all the way to the depth cap.
  if (!std::isfinite(left + right)) return left + right;
  const double delta = left + right - whole;
  // force_split keeps the recursion going for a few levels even when the
  // error estimate looks tiny: a narrow peak between the initial sample
  // points would otherwise be accepted as zero. The relative floor keeps an
  // absolute tolerance that is unreachable for huge-magnitude integrands
  // (exp-tilted moments) from spending the whole budget: past full double
  // precision on this panel there is nothing left to gain.
  const double accept = std::max(tol, 1e-12 * std::fabs(left + right));
  if (depth <= 0 || budget.left <= 0 ||
      (force_split <= 0 && std::fabs(delta) <= 15.0 * accept)) {
    return left + right + delta / 15.0;
  }
  return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1,
                       force_split - 1, budget) +
         adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1,
                       force_split - 1, budget);
}

}  // namespace detail

// Adaptive Simpson quadrature with Richardson correction. `tol` is an
// absolute tolerance on the whole interval; recursion depth and the total
// evaluation budget are capped so pathological integrands terminate with the
// best available estimate. The first four levels always split (16 panels)
// before the error estimate may stop the recursion. Fixed caps keep the
// traversal, and therefore the result, deterministic.
template <class F>
double integrate(const F& f, double a, double b, double tol = 1e-9, int max_depth = 48,
                 long long max_evals = 1 << 16) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  const double whole = detail::simpson(f, a, fa, b, fb, m, fm);
  detail::EvalBudget budget{max_evals - 3};
  return detail::adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth, 4, budget);
}

// Iterated 2-D quadrature over a rectangle; the inner integral is resolved
// one decade tighter than the outer so the outer error estimate stays honest.
template <class F>
double integrate_2d(const F& f, double ax, double bx, double ay, double by,
                    double tol = 1e-8) {
  auto outer = [&](double x) {
    auto inner = [&](double y) { return f(x, y); };
    return integrate(inner, ay, by, 0.1 * tol);
  };
  return integrate(outer, ax, bx, tol);
}

}  // namespace dualmix
