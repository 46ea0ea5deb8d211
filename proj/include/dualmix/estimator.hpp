#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dualmix/constraints.hpp"
#include "dualmix/dataset.hpp"
#include "dualmix/divergence.hpp"
#include "dualmix/families.hpp"
#include "dualmix/smallmat.hpp"

namespace dualmix {

// Full parameter point of the semiparametric mixture: mixing weight lambda,
// parametric component parameters theta, moment-constraint parameters alpha.
struct MixtureParams {
  double lambda = 0.5;
  Vec theta;
  Vec alpha;

  Vec flatten() const;
  static MixtureParams unflatten(std::span<const double> x, int theta_dim,
                                 int alpha_dim);
};

// Moment statistics of a sample under a constraint set: empirical means of
// g and g g^T. These are sufficient for the chi-square inner problem; other
// divergences additionally need the retained sample for per-point conjugate
// sums. n == 0 marks population-level statistics built from exact moments.
struct SampleStats {
  std::size_t n = 0;
  Vec gbar;
  SymMat gg;
  std::shared_ptr<const Dataset> sample;

  explicit SampleStats(int q) : gbar(q, 0.0), gg(q) {}
};

// One O(n) pass over the data accumulating the monomial power sums that gbar
// and gg need (vectorized kernel on univariate data). keep_sample retains a
// copy of the dataset for divergences without a closed-form inner solution.
SampleStats compute_stats(const Dataset& data, const ConstraintSet& cs,
                          bool keep_sample = false);

// Exact-moment counterpart of compute_stats for the two-component mixture
// lambda * f1(theta1) + (1 - lambda) * f0(theta0).
SampleStats population_stats(double lambda, const Family& f1,
                             std::span<const double> theta1, const Family& f0,
                             std::span<const double> theta0, const ConstraintSet& cs);

// Moments of the parametric component against the constraint monomials:
// vector E_theta[g] and Gram matrix E_theta[g g^T].
Vec param_moment_vec(const Family& fam, std::span<const double> theta,
                     const ConstraintSet& cs);
SymMat param_gram(const Family& fam, std::span<const double> theta,
                  const ConstraintSet& cs);

// The quadratic form of the dual problem at phi,
//   Omega_n = E_n[g g^T] / (1 - lambda) - lambda/(1 - lambda) E_theta[g g^T].
// phi lies in the working feasible set exactly when Omega_n is s.p.d.
SymMat omega_n(const MixtureParams& phi, const SampleStats& stats, const Family& fam,
               const ConstraintSet& cs);

// The vector side of the dual system,
//   b = E_n[g] / (1 - lambda) - lambda/(1 - lambda) E_theta[g],
// and the residual r = m(alpha) - b it is matched against.
Vec dual_target(const MixtureParams& phi, const SampleStats& stats, const Family& fam,
                const ConstraintSet& cs);

struct InnerSolution {
  bool feasible = false;   // the feasibility gate (Omega s.p.d.) passed
  bool converged = false;  // the inner maximization reached its tolerance
  Vec xi;
  double objective = 0.0;  // sup_xi H_n(phi, xi)
  int iterations = 0;
};

// Closed-form inner maximization for the chi-square divergence:
// xi = Omega^-1 r, objective r^T Omega^-1 r / 2.
InnerSolution xi_inner_chi2(const MixtureParams& phi, const SampleStats& stats,
                            const Family& fam, const ConstraintSet& cs);

// Damped Newton ascent of xi -> H_n(phi, xi) from xi = 0 for any divergence
// with a closed-form conjugate. Needs the retained sample; univariate
// families only (the parametric correction term is a 1-D integral).
InnerSolution xi_inner_generic(const MixtureParams& phi, const SampleStats& stats,
                               const Family& fam, const ConstraintSet& cs,
                               const Divergence& div, int max_iter = 100,
                               double grad_tol = 1e-9);

// The dual criterion
//   H_n(phi, xi) = xi^T m(alpha) - 1/(1-lambda) E_n[psi(xi^T g)]
//                  + lambda/(1-lambda) E_theta[psi(xi^T g)].
// Returns -inf when xi leaves the conjugate domain on the sample or makes
// the parametric integral diverge.
double h_n(const MixtureParams& phi, std::span<const double> xi,
           const SampleStats& stats, const Family& fam, const ConstraintSet& cs,
           const Divergence& div);

// sup_xi H_n(phi, xi), or `penalty` when phi fails the feasibility gate
// (including non-finite moments and singular inner systems).
double profiled_objective(const MixtureParams& phi, const SampleStats& stats,
                          const Family& fam, const ConstraintSet& cs,
                          const Divergence& div, double penalty = 100.0);

struct NelderMeadOptions {
  int max_evals = 2000;
  double diam_tol = 1e-8;
};

struct NelderMeadResult {
  Vec x;
  double value = 0.0;
  int evals = 0;
  bool converged = false;
};

// Box-constrained Nelder-Mead (reflection 1, expansion 2, contraction 1/2,
// shrink 1/2); trial points are clamped to [lo, hi]. Stops when the simplex
// infinity-diameter falls below diam_tol or the evaluation budget is spent.
NelderMeadResult nelder_mead_minimize(const std::function<double(const Vec&)>& f,
                                      const Vec& x0, const Vec& lo, const Vec& hi,
                                      const NelderMeadOptions& opts = {});

// Raised when no randomly drawn start passes the feasibility gate.
class NoFeasibleStartError : public std::runtime_error {
 public:
  explicit NoFeasibleStartError(const std::string& what) : std::runtime_error(what) {}
};

struct EstimateOptions {
  int starts = 10;
  int max_start_draws = 1000;
  std::uint64_t seed = 0;
  double penalty = 100.0;
  // Sampling box for starts, flattened (lambda, theta, alpha); empty means
  // a default box derived from the parameter bounds.
  Vec start_lo, start_hi;
  NelderMeadOptions nm;
};

struct StartRecord {
  Vec x0;
  Vec x;
  double objective = 0.0;
  bool converged = false;
  int evals = 0;
};

struct EstimateResult {
  MixtureParams phi;
  Vec xi;
  double objective = 0.0;
  bool converged = false;
  int feasible_starts = 0;
  int rejected_draws = 0;
  int best_start = -1;
  std::vector<StartRecord> starts;
  std::vector<std::string> warnings;
};

// Multi-start Nelder-Mead minimization of the profiled dual objective.
// Starts are drawn uniformly in the start box and must pass the feasibility
// gate; ties between equally good minima go to the lower start index.
EstimateResult estimate(const SampleStats& stats, const Family& fam,
                        const ConstraintSet& cs, const Divergence& div,
                        const EstimateOptions& opts = {});

// Residual of the population moment system at phi,
//   r(phi) = m* / (1-lambda) - lambda/(1-lambda) E_theta[g] - m(alpha),
// where m* is the constraint-moment vector of the sampling distribution.
// Zero at the truth; vanishing along a manifold of phi values signals a
// non-identifiable model.
Vec moment_system_residual(const MixtureParams& phi, const Vec& m_star,
                           const Family& fam, const ConstraintSet& cs);

}  // namespace dualmix
