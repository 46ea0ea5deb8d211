#include "dualmix/constraints.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "dualmix/gamma_fn.hpp"

namespace dualmix {

namespace {
constexpr int kMaxExponent = 4;
constexpr double kShapeFloor = 1e-3;
constexpr double kParamCap = 1e6;
}  // namespace

MomentTerm MomentTerm::constant(double c) {
  MomentTerm t;
  t.kind = Kind::constant;
  t.coeff = c;
  return t;
}

MomentTerm MomentTerm::power(double c, int index, double exponent) {
  MomentTerm t;
  t.kind = Kind::power;
  t.coeff = c;
  t.index = index;
  t.exponent = exponent;
  return t;
}

MomentTerm MomentTerm::gamma_affine(double c, int index, double shift, double slope,
                                    bool reciprocal) {
  MomentTerm t;
  t.kind = Kind::gamma_affine;
  t.coeff = c;
  t.index = index;
  t.shift = shift;
  t.slope = slope;
  t.reciprocal = reciprocal;
  return t;
}

double MomentTerm::value(std::span<const double> alpha) const {
  switch (kind) {
    case Kind::constant:
      return coeff;
    case Kind::power:
      return coeff * std::pow(alpha[index], exponent);
    case Kind::gamma_affine: {
      const double u = shift + (reciprocal ? slope / alpha[index] : slope * alpha[index]);
      return coeff * gamma_fn(u);
    }
  }
  return 0.0;
}

double MomentTerm::deriv(std::span<const double> alpha, int j) const {
  if (kind == Kind::constant || j != index) return 0.0;
  switch (kind) {
    case Kind::power:
      return coeff * exponent * std::pow(alpha[index], exponent - 1.0);
    case Kind::gamma_affine: {
      const double a = alpha[index];
      const double u = shift + (reciprocal ? slope / a : slope * a);
      const double du = reciprocal ? -slope / (a * a) : slope;
      return coeff * gamma_fn(u) * digamma(u) * du;
    }
    default:
      return 0.0;
  }
}

void ConstraintSet::validate() const {
  if (point_dim_ != 1 && point_dim_ != 2) {
    throw std::invalid_argument("constraint point dimension must be 1 or 2");
  }
  if (exps_.empty()) throw std::invalid_argument("constraint set needs at least one moment");
  if (static_cast<int>(exps_.size()) > 4) {
    throw std::invalid_argument("at most 4 substantive constraints are supported");
  }
  std::set<std::array<int, 2>> seen;
  for (const auto& e : exps_) {
    if (e[0] < 0 || e[1] < 0 || e[0] > kMaxExponent || e[1] > kMaxExponent) {
      throw std::invalid_argument("monomial exponents must be in [0, 4]");
    }
    if (point_dim_ == 1 && e[1] != 0) {
      throw std::invalid_argument("univariate constraints cannot use the second axis");
    }
    if (e[0] == 0 && e[1] == 0) {
      throw std::invalid_argument("the mass constraint is implicit; exponent (0,0) is reserved");
    }
    if (!seen.insert(e).second) {
      throw std::invalid_argument("duplicate monomial exponent in constraint set");
    }
  }
  if (terms_.size() != exps_.size()) {
    throw std::invalid_argument("moment map must have one component per monomial");
  }
  if (static_cast<int>(alpha_lo_.size()) != alpha_dim_ ||
      static_cast<int>(alpha_hi_.size()) != alpha_dim_) {
    throw std::invalid_argument("alpha bounds must match alpha dimension");
  }
  for (const auto& comp : terms_) {
    for (const auto& t : comp) {
      if (t.kind != MomentTerm::Kind::constant &&
          (t.index < 0 || t.index >= alpha_dim_)) {
        throw std::invalid_argument("moment term references alpha index out of range");
      }
    }
  }
}

ConstraintSet ConstraintSet::weibull_moments(const std::vector<int>& orders,
                                             double sigma0) {
  if (!(sigma0 > 0.0)) throw std::invalid_argument("sigma0 must be positive");
  ConstraintSet cs;
  cs.tag_ = "weibull_moments";
  cs.point_dim_ = 1;
  cs.alpha_dim_ = 1;
  cs.alpha_lo_ = {kShapeFloor};
  cs.alpha_hi_ = {kParamCap};
  cs.orders_ = orders;
  cs.sigma0_ = sigma0;
  for (int e : orders) {
    cs.exps_.push_back({e, 0});
    cs.terms_.push_back(
        {MomentTerm::gamma_affine(std::pow(sigma0, e), 0, 1.0, e, true)});
  }
  cs.validate();
  return cs;
}

ConstraintSet ConstraintSet::two_sided_weibull_moments(const std::vector<int>& orders,
                                                       double sigma0) {
  if (!(sigma0 > 0.0)) throw std::invalid_argument("sigma0 must be positive");
  ConstraintSet cs;
  cs.tag_ = "two_sided_weibull_moments";
  cs.point_dim_ = 1;
  cs.alpha_dim_ = 1;
  cs.alpha_lo_ = {kShapeFloor};
  cs.alpha_hi_ = {kParamCap};
  cs.orders_ = orders;
  cs.sigma0_ = sigma0;
  for (int e : orders) {
    cs.exps_.push_back({e, 0});
    if (e % 2 == 1) {
      cs.terms_.push_back({MomentTerm::constant(0.0)});
    } else {
      cs.terms_.push_back(
          {MomentTerm::gamma_affine(std::pow(sigma0, e), 0, 1.0, e, true)});
    }
  }
  cs.validate();
  return cs;
}

ConstraintSet ConstraintSet::bivariate_mean() {
  ConstraintSet cs;
  cs.tag_ = "bivariate_mean";
  cs.point_dim_ = 2;
  cs.alpha_dim_ = 1;
  cs.alpha_lo_ = {-kParamCap};
  cs.alpha_hi_ = {kParamCap};
  cs.exps_ = {{1, 0}, {0, 1}};
  cs.terms_ = {{MomentTerm::power(1.0, 0, 1.0)}, {MomentTerm::power(1.0, 0, 1.0)}};
  cs.validate();
  return cs;
}

ConstraintSet ConstraintSet::bivariate_mean_cross(double rho0) {
  ConstraintSet cs;
  cs.tag_ = "bivariate_mean_cross";
  cs.point_dim_ = 2;
  cs.alpha_dim_ = 1;
  cs.alpha_lo_ = {-kParamCap};
  cs.alpha_hi_ = {kParamCap};
  cs.rho0_ = rho0;
  cs.exps_ = {{1, 0}, {0, 1}, {1, 1}};
  cs.terms_ = {{MomentTerm::power(1.0, 0, 1.0)},
               {MomentTerm::power(1.0, 0, 1.0)},
               {MomentTerm::power(1.0, 0, 2.0), MomentTerm::constant(rho0)}};
  cs.validate();
  return cs;
}

ConstraintSet ConstraintSet::fixed_targets(
    const std::vector<std::array<int, 2>>& exponents, const Vec& targets,
    int point_dim) {
  if (exponents.size() != targets.size()) {
    throw std::invalid_argument("one target per monomial required");
  }
  ConstraintSet cs;
  cs.tag_ = "fixed_targets";
  cs.point_dim_ = point_dim;
  cs.alpha_dim_ = 0;
  cs.exps_ = exponents;
  cs.targets_ = targets;
  for (double t : targets) cs.terms_.push_back({MomentTerm::constant(t)});
  cs.validate();
  return cs;
}

ConstraintSet ConstraintSet::custom(const std::vector<std::array<int, 2>>& exponents,
                                    const std::vector<std::vector<MomentTerm>>& terms,
                                    int point_dim, int alpha_dim, const Vec& alpha_lo,
                                    const Vec& alpha_hi) {
  ConstraintSet cs;
  cs.tag_ = "custom";
  cs.point_dim_ = point_dim;
  cs.alpha_dim_ = alpha_dim;
  cs.exps_ = exponents;
  cs.terms_ = terms;
  cs.alpha_lo_ = alpha_lo;
  cs.alpha_hi_ = alpha_hi;
  cs.validate();
  return cs;
}

void ConstraintSet::alpha_bounds(Vec& lo, Vec& hi) const {
  lo = alpha_lo_;
  hi = alpha_hi_;
}

Vec ConstraintSet::eval_g(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != point_dim_) {
    throw std::invalid_argument("sample point dimension mismatch");
  }
  Vec g(q());
  g[0] = 1.0;
  // Precompute coordinate powers up to the largest exponent used.
  double xp[kMaxExponent + 1] = {1.0};
  double yp[kMaxExponent + 1] = {1.0};
  for (int k = 1; k <= kMaxExponent; ++k) xp[k] = xp[k - 1] * x[0];
  if (point_dim_ == 2) {
    for (int k = 1; k <= kMaxExponent; ++k) yp[k] = yp[k - 1] * x[1];
  }
  for (int i = 0; i < ell(); ++i) {
    g[i + 1] = xp[exps_[i][0]] * yp[exps_[i][1]];
  }
  return g;
}

Vec ConstraintSet::eval_m(std::span<const double> alpha) const {
  if (static_cast<int>(alpha.size()) != alpha_dim_) {
    throw std::invalid_argument("alpha dimension mismatch");
  }
  Vec m(q());
  m[0] = 1.0;
  for (int i = 0; i < ell(); ++i) {
    double v = 0.0;
    for (const auto& t : terms_[i]) v += t.value(alpha);
    m[i + 1] = v;
  }
  return m;
}

Mat ConstraintSet::eval_grad_m(std::span<const double> alpha) const {
  if (static_cast<int>(alpha.size()) != alpha_dim_) {
    throw std::invalid_argument("alpha dimension mismatch");
  }
  Mat g(q(), alpha_dim_);
  for (int i = 0; i < ell(); ++i) {
    for (int j = 0; j < alpha_dim_; ++j) {
      double v = 0.0;
      for (const auto& t : terms_[i]) v += t.deriv(alpha, j);
      g(i + 1, j) = v;
    }
  }
  return g;
}

int ConstraintSet::max_order(int axis) const {
  int m = 0;
  for (const auto& e : exps_) m = std::max(m, e[axis]);
  return m;
}

}  // namespace dualmix
