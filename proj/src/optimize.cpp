#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dualmix/estimator.hpp"
#include "dualmix/rng.hpp"

namespace dualmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLambdaEdge = 1e-4;

Vec clamp_to_box(Vec x, const Vec& lo, const Vec& hi) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
  return x;
}

double simplex_diameter(const std::vector<Vec>& verts) {
  double d = 0.0;
  for (std::size_t i = 0; i < verts.size(); ++i)
    for (std::size_t j = i + 1; j < verts.size(); ++j)
      for (std::size_t k = 0; k < verts[i].size(); ++k)
        d = std::max(d, std::fabs(verts[i][k] - verts[j][k]));
  return d;
}

}  // namespace

NelderMeadResult nelder_mead_minimize(const std::function<double(const Vec&)>& f,
                                      const Vec& x0, const Vec& lo, const Vec& hi,
                                      const NelderMeadOptions& opts) {
  const std::size_t dim = x0.size();
  if (dim == 0 || lo.size() != dim || hi.size() != dim) {
    throw std::invalid_argument("optimizer box must match the parameter dimension");
  }
  for (std::size_t i = 0; i < dim; ++i) {
    if (!(lo[i] < hi[i])) throw std::invalid_argument("optimizer box is empty");
  }

  NelderMeadResult res;
  auto eval = [&](const Vec& x) {
    ++res.evals;
    const double v = f(x);
    return std::isnan(v) ? kInf : v;
  };

  // Initial simplex: axis steps of 5% of the box extent, flipped inward when
  // a vertex would leave the box.
  std::vector<Vec> verts;
  std::vector<double> fv;
  verts.push_back(clamp_to_box(x0, lo, hi));
  for (std::size_t i = 0; i < dim; ++i) {
    Vec v = verts[0];
    double h = 0.05 * (hi[i] - lo[i]);
    if (v[i] + h > hi[i]) h = -h;
    v[i] += h;
    verts.push_back(clamp_to_box(std::move(v), lo, hi));
  }
  for (const Vec& v : verts) fv.push_back(eval(v));

  std::vector<std::size_t> ord(verts.size());
  const std::size_t last = dim;  // worst index after sorting
  while (res.evals < opts.max_evals) {
    std::iota(ord.begin(), ord.end(), 0);
    std::stable_sort(ord.begin(), ord.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    {
      std::vector<Vec> sv(verts.size());
      std::vector<double> sf(verts.size());
      for (std::size_t i = 0; i < verts.size(); ++i) {
        sv[i] = verts[ord[i]];
        sf[i] = fv[ord[i]];
      }
      verts.swap(sv);
      fv.swap(sf);
    }
    if (simplex_diameter(verts) <= opts.diam_tol) {
      res.converged = true;
      break;
    }

    Vec centroid(dim, 0.0);
    for (std::size_t i = 0; i < last; ++i)
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += verts[i][k];
    for (double& c : centroid) c /= static_cast<double>(last);

    auto blend = [&](double coef) {
      Vec x(dim);
      for (std::size_t k = 0; k < dim; ++k)
        x[k] = centroid[k] + coef * (centroid[k] - verts[last][k]);
      return clamp_to_box(std::move(x), lo, hi);
    };

    const Vec xr = blend(1.0);
    const double fr = eval(xr);
    bool shrink = false;
    if (fr < fv[0]) {
      const Vec xe = blend(2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        verts[last] = xe;
        fv[last] = fe;
      } else {
        verts[last] = xr;
        fv[last] = fr;
      }
    } else if (fr < fv[last - 1]) {
      verts[last] = xr;
      fv[last] = fr;
    } else if (fr < fv[last]) {
      // Outside contraction, halfway between centroid and reflected point.
      const Vec xc = blend(0.5);
      const double fc = eval(xc);
      if (fc <= fr) {
        verts[last] = xc;
        fv[last] = fc;
      } else {
        shrink = true;
      }
    } else {
      // Inside contraction, halfway between centroid and worst vertex.
      const Vec xc = blend(-0.5);
      const double fc = eval(xc);
      if (fc < fv[last]) {
        verts[last] = xc;
        fv[last] = fc;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (std::size_t i = 1; i < verts.size(); ++i) {
        for (std::size_t k = 0; k < dim; ++k)
          verts[i][k] = verts[0][k] + 0.5 * (verts[i][k] - verts[0][k]);
        fv[i] = eval(verts[i]);
      }
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < verts.size(); ++i) {
    if (fv[i] < fv[best]) best = i;
  }
  res.x = verts[best];
  res.value = fv[best];
  return res;
}

namespace {

// Default uniform sampling box for multi-start draws: generous but bounded
// windows, intersected with the hard parameter bounds. Positive-only
// coordinates (shape parameters) sample in [0.2, 5].
void default_start_box(const Vec& lo, const Vec& hi, Vec& slo, Vec& shi) {
  const std::size_t dim = lo.size();
  slo.resize(dim);
  shi.resize(dim);
  slo[0] = 0.05;
  shi[0] = 0.95;
  for (std::size_t i = 1; i < dim; ++i) {
    if (lo[i] > 0.0) {
      slo[i] = std::max(lo[i], 0.2);
      shi[i] = std::min(hi[i], 5.0);
    } else {
      slo[i] = std::max(lo[i], -5.0);
      shi[i] = std::min(hi[i], 5.0);
    }
  }
}

}  // namespace

EstimateResult estimate(const SampleStats& stats, const Family& fam,
                        const ConstraintSet& cs, const Divergence& div,
                        const EstimateOptions& opts) {
  if (fam.dim() != cs.point_dim()) {
    throw std::invalid_argument("family dimension does not match constraint set");
  }
  const int d = fam.theta_dim();
  const int s = cs.alpha_dim();
  const std::size_t dim = static_cast<std::size_t>(1 + d + s);

  // Hard box: lambda strictly inside (0, 1), theta and alpha from their
  // declared bounds.
  Vec lo{kLambdaEdge}, hi{1.0 - kLambdaEdge};
  {
    Vec tlo, thi, alo, ahi;
    fam.theta_bounds(tlo, thi);
    cs.alpha_bounds(alo, ahi);
    lo.insert(lo.end(), tlo.begin(), tlo.end());
    hi.insert(hi.end(), thi.begin(), thi.end());
    lo.insert(lo.end(), alo.begin(), alo.end());
    hi.insert(hi.end(), ahi.begin(), ahi.end());
  }

  Vec slo = opts.start_lo, shi = opts.start_hi;
  if (slo.empty() && shi.empty()) {
    default_start_box(lo, hi, slo, shi);
  }
  if (slo.size() != dim || shi.size() != dim) {
    throw std::invalid_argument("start box must match the parameter dimension");
  }
  for (std::size_t i = 0; i < dim; ++i) {
    slo[i] = std::clamp(slo[i], lo[i], hi[i]);
    shi[i] = std::clamp(shi[i], lo[i], hi[i]);
    if (!(slo[i] <= shi[i])) throw std::invalid_argument("start box is empty");
  }

  EstimateResult res;
  if (cs.ell() < d + s + 1) {
    res.warnings.push_back(
        "constraint count below parameter count: the moment system is "
        "underdetermined and the model may not be identifiable");
  }

  // Draw feasible starts: uniform in the start box, accepted only when the
  // dual quadratic form is positive definite there.
  CounterRng rng(opts.seed, 1);
  std::vector<Vec> starts;
  int draws = 0;
  while (static_cast<int>(starts.size()) < opts.starts && draws < opts.max_start_draws) {
    ++draws;
    Vec x(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      x[i] = slo[i] + (shi[i] - slo[i]) * rng.next_unit();
    }
    const MixtureParams phi = MixtureParams::unflatten(x, d, s);
    bool ok = false;
    try {
      ok = is_spd_sylvester(omega_n(phi, stats, fam, cs));
    } catch (const std::exception&) {
      ok = false;
    }
    if (ok) starts.push_back(std::move(x));
  }
  res.feasible_starts = static_cast<int>(starts.size());
  res.rejected_draws = draws - res.feasible_starts;
  if (starts.empty()) {
    throw NoFeasibleStartError("no feasible start found after " + std::to_string(draws) +
                               " draws (dual quadratic form never positive definite)");
  }
  if (static_cast<int>(starts.size()) < opts.starts) {
    res.warnings.push_back("only " + std::to_string(starts.size()) +
                           " feasible starts found after " + std::to_string(draws) +
                           " draws");
  }

  auto objective = [&](const Vec& x) {
    const MixtureParams phi = MixtureParams::unflatten(x, d, s);
    return profiled_objective(phi, stats, fam, cs, div, opts.penalty);
  };

  int best = -1;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    const NelderMeadResult nm = nelder_mead_minimize(objective, starts[k], lo, hi, opts.nm);
    StartRecord rec;
    rec.x0 = starts[k];
    rec.x = nm.x;
    rec.objective = nm.value;
    rec.converged = nm.converged;
    rec.evals = nm.evals;
    res.starts.push_back(std::move(rec));
    if (best < 0 || nm.value < res.starts[best].objective) {
      best = static_cast<int>(k);
    }
  }
  res.best_start = best;
  const StartRecord& win = res.starts[best];
  res.phi = MixtureParams::unflatten(win.x, d, s);
  res.objective = win.objective;
  res.converged = win.converged && win.objective < opts.penalty;

  // Inner solution at the winner, for reporting xi.
  try {
    const InnerSolution inner =
        div.is_chi2() ? xi_inner_chi2(res.phi, stats, fam, cs)
                      : xi_inner_generic(res.phi, stats, fam, cs, div);
    if (inner.feasible) res.xi = inner.xi;
  } catch (const std::exception&) {
  }

  // Diagnostics: ill-conditioned dual system or separated equally good minima
  // both flag a possibly non-identifiable model.
  try {
    const double cond = cond_inf(omega_n(res.phi, stats, fam, cs));
    if (cond > 1e10) {
      res.warnings.push_back("dual system is near-singular at the estimate "
                             "(condition number about " + std::to_string(cond) + ")");
    }
  } catch (const std::exception&) {
  }
  for (std::size_t k = 0; k < res.starts.size(); ++k) {
    if (static_cast<int>(k) == best || !res.starts[k].converged) continue;
    if (std::fabs(res.starts[k].objective - win.objective) < 1e-6) {
      double sep = 0.0;
      for (std::size_t i = 0; i < dim; ++i)
        sep = std::max(sep, std::fabs(res.starts[k].x[i] - win.x[i]));
      if (sep > 0.1) {
        res.warnings.push_back(
            "multiple separated minima with equal objective: the model may "
            "not be identifiable");
        break;
      }
    }
  }
  return res;
}

}  // namespace dualmix
