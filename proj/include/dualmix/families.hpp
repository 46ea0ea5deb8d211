#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>

#include "dualmix/dataset.hpp"
#include "dualmix/rng.hpp"
#include "dualmix/smallmat.hpp"

namespace dualmix {

enum class FamilyKind {
  gaussian,
  weibull,
  two_sided_weibull,
  lognormal,
  bivariate_gaussian,
};

// How the bivariate Gaussian mean depends on theta.
enum class MeanMode {
  fixed,  // theta empty, mean is a constant
  line,   // theta = (t), mean = base + t * dir
  free2,  // theta = (mx, my)
};

// A parametric location/shape family with everything the estimator needs:
// density and its theta-gradient, raw moments in closed form, CDF, and a
// deterministic inverse-CDF (or Box-Muller) sampler. Free parameters live in
// `theta`; scale-type nuisance parameters are frozen at construction, which
// matches how the mixture scenarios are specified.
class Family {
 public:
  struct Spec {
    FamilyKind kind = FamilyKind::gaussian;
    double sigma = 1.0;   // gaussian standard deviation
    double scale = 1.0;   // weibull / two-sided weibull scale
    double sdlog = 1.0;   // lognormal log-scale standard deviation
    double sigma2 = 1.0;  // bivariate per-axis variance
    double rho = 0.0;     // bivariate cross covariance
    MeanMode mean_mode = MeanMode::fixed;
    double mean_x = 0.0, mean_y = 0.0;  // fixed mean / line base
    double dir_x = 1.0, dir_y = 1.0;    // line direction
  };

  // theta = (mu), density N(mu, sigma^2).
  static Family gaussian(double sigma);
  // theta = (shape), scale fixed; support [0, inf).
  static Family weibull(double scale);
  // theta = (shape), scale fixed; density (1/2)(shape/scale) *
  // (|x|/scale)^(shape-1) exp(-(|x|/scale)^shape), symmetric about 0.
  static Family two_sided_weibull(double scale);
  // theta = (mulog), log X ~ N(mulog, sdlog^2).
  static Family lognormal(double sdlog);
  // Covariance [[sigma2, rho], [rho, sigma2]] with the mean fixed...
  static Family bivariate_gaussian_fixed(double sigma2, double rho, double mean_x,
                                         double mean_y);
  // ...constrained to a line base + theta * dir...
  static Family bivariate_gaussian_line(double sigma2, double rho, double base_x,
                                        double base_y, double dir_x, double dir_y);
  // ...or fully free, theta = (mean_x, mean_y).
  static Family bivariate_gaussian_free(double sigma2, double rho);

  const Spec& spec() const { return spec_; }
  FamilyKind kind() const { return spec_.kind; }
  int dim() const { return spec_.kind == FamilyKind::bivariate_gaussian ? 2 : 1; }
  int theta_dim() const;
  void theta_bounds(Vec& lo, Vec& hi) const;
  std::string name() const;

  double density(std::span<const double> theta, std::span<const double> x) const;
  Vec density_grad_theta(std::span<const double> theta, std::span<const double> x) const;

  // Raw moment E[X^order] (univariate families only).
  double moment(std::span<const double> theta, int order) const;
  // Mixed raw moment E[X^ax Y^ay]; univariate families require ay == 0.
  double mixed_moment(std::span<const double> theta, int ax, int ay) const;

  // Distribution function (univariate families only).
  double cdf(std::span<const double> theta, double x) const;

  // Writes one draw (dim() coordinates) using the supplied generator.
  void draw(CounterRng& rng, std::span<const double> theta, double* out) const;

  // n independent draws from the stream (seed, stream); throws on n == 0.
  Dataset sample(std::span<const double> theta, std::size_t n, std::uint64_t seed,
                 std::uint64_t stream) const;

  // Interval carrying all but ~1e-16 of the mass along one axis, used to
  // truncate quadrature.
  std::pair<double, double> integration_range(std::span<const double> theta,
                                              int axis = 0) const;

 private:
  explicit Family(Spec spec) : spec_(spec) {}
  void check_theta(std::span<const double> theta) const;

  Spec spec_;
};

}  // namespace dualmix
