#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "dualmix/smallmat.hpp"

namespace dualmix {

// One additive term of a moment-map component m_i(alpha). The vocabulary
// (constant, scaled power of one alpha coordinate, gamma of an affine or
// reciprocal-affine argument) covers every moment map used by the bundled
// scenarios and is what custom JSON configs can express.
struct MomentTerm {
  enum class Kind { constant, power, gamma_affine };

  Kind kind = Kind::constant;
  double coeff = 0.0;      // multiplies the whole term
  int index = 0;           // alpha coordinate the term depends on
  double exponent = 1.0;   // power: coeff * alpha^exponent
  double shift = 0.0;      // gamma_affine: coeff * Gamma(shift + slope * u)
  double slope = 1.0;      //   with u = alpha or 1/alpha
  bool reciprocal = false; // gamma argument uses 1/alpha instead of alpha

  static MomentTerm constant(double c);
  static MomentTerm power(double c, int index, double exponent);
  static MomentTerm gamma_affine(double c, int index, double shift, double slope,
                                 bool reciprocal);

  double value(std::span<const double> alpha) const;
  // Derivative with respect to alpha[j].
  double deriv(std::span<const double> alpha, int j) const;
};

// The linear moment constraints defining the nonparametric component: the
// measure must integrate the monomials x^a y^b listed in `exponents` to the
// targets m(alpha), plus the implicit mass constraint (exponent 0, target 1)
// that is always row 0 of eval_g / eval_m.
class ConstraintSet {
 public:
  // Raw moments of a Weibull(shape = alpha, scale = sigma0):
  // m_i = sigma0^e Gamma(1 + e / alpha) for each order e.
  static ConstraintSet weibull_moments(const std::vector<int>& orders, double sigma0);
  // Raw moments of the symmetric two-sided Weibull: odd orders are 0,
  // even orders are sigma0^e Gamma(1 + e / alpha).
  static ConstraintSet two_sided_weibull_moments(const std::vector<int>& orders,
                                                 double sigma0);
  // Bivariate first moments pinned to a common coordinate: E[X] = E[Y] = alpha.
  static ConstraintSet bivariate_mean();
  // As above plus the cross moment E[XY] = alpha^2 + rho0.
  static ConstraintSet bivariate_mean_cross(double rho0);
  // Fixed numeric targets (no alpha parameter).
  static ConstraintSet fixed_targets(const std::vector<std::array<int, 2>>& exponents,
                                     const Vec& targets, int point_dim);
  // Fully custom set.
  static ConstraintSet custom(const std::vector<std::array<int, 2>>& exponents,
                              const std::vector<std::vector<MomentTerm>>& terms,
                              int point_dim, int alpha_dim, const Vec& alpha_lo,
                              const Vec& alpha_hi);

  const std::string& tag() const { return tag_; }
  int point_dim() const { return point_dim_; }
  // Number of substantive constraints (mass excluded).
  int ell() const { return static_cast<int>(exps_.size()); }
  // Rows of the dual system including the mass row.
  int q() const { return ell() + 1; }
  int alpha_dim() const { return alpha_dim_; }
  void alpha_bounds(Vec& lo, Vec& hi) const;
  const std::vector<std::array<int, 2>>& exponents() const { return exps_; }
  const std::vector<std::vector<MomentTerm>>& terms() const { return terms_; }

  // (1, x^{a_1} y^{b_1}, ..., x^{a_l} y^{b_l}) at one sample point.
  Vec eval_g(std::span<const double> x) const;
  // (1, m_1(alpha), ..., m_l(alpha)).
  Vec eval_m(std::span<const double> alpha) const;
  // q x alpha_dim Jacobian of eval_m; row 0 is zero.
  Mat eval_grad_m(std::span<const double> alpha) const;

  // Largest monomial exponent along one axis, for planning the stats pass.
  int max_order(int axis) const;

  // Factory parameters, kept for exact config round-trips.
  const std::vector<int>& orders() const { return orders_; }
  double sigma0() const { return sigma0_; }
  double rho0() const { return rho0_; }
  const Vec& targets() const { return targets_; }

 private:
  ConstraintSet() = default;
  void validate() const;

  std::string tag_;
  int point_dim_ = 1;
  int alpha_dim_ = 0;
  std::vector<std::array<int, 2>> exps_;
  std::vector<std::vector<MomentTerm>> terms_;
  Vec alpha_lo_, alpha_hi_;

  std::vector<int> orders_;
  double sigma0_ = 0.0;
  double rho0_ = 0.0;
  Vec targets_;
};

}  // namespace dualmix
