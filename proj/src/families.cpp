#include "dualmix/families.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dualmix/gamma_fn.hpp"

namespace dualmix {

namespace {

constexpr double kTwoPi = 6.28318530717958647693;
constexpr double kSqrtTwoPi = 2.50662827463100050242;
constexpr double kParamCap = 1e6;
constexpr double kShapeFloor = 1e-3;
constexpr int kMaxMixedOrder = 16;

double require_positive(double v, const char* what) {
  if (!(v > 0.0)) {
    throw std::invalid_argument(std::string(what) + " must be positive");
  }
  return v;
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// E[X^k] for N(mu, var) via m_k = mu m_{k-1} + (k-1) var m_{k-2}.
double gaussian_raw_moment(double mu, double var, int order) {
  double m_prev = 1.0;  // m_0
  if (order == 0) return m_prev;
  double m = mu;  // m_1
  for (int k = 2; k <= order; ++k) {
    const double next = mu * m + (k - 1) * var * m_prev;
    m_prev = m;
    m = next;
  }
  return m;
}

}  // namespace

Family Family::gaussian(double sigma) {
  Spec s;
  s.kind = FamilyKind::gaussian;
  s.sigma = require_positive(sigma, "gaussian sigma");
  return Family(s);
}

Family Family::weibull(double scale) {
  Spec s;
  s.kind = FamilyKind::weibull;
  s.scale = require_positive(scale, "weibull scale");
  return Family(s);
}

Family Family::two_sided_weibull(double scale) {
  Spec s;
  s.kind = FamilyKind::two_sided_weibull;
  s.scale = require_positive(scale, "two-sided weibull scale");
  return Family(s);
}

Family Family::lognormal(double sdlog) {
  Spec s;
  s.kind = FamilyKind::lognormal;
  s.sdlog = require_positive(sdlog, "lognormal sdlog");
  return Family(s);
}

Family Family::bivariate_gaussian_fixed(double sigma2, double rho, double mean_x,
                                        double mean_y) {
  Spec s;
  s.kind = FamilyKind::bivariate_gaussian;
  s.sigma2 = require_positive(sigma2, "bivariate variance");
  if (std::fabs(rho) >= sigma2) {
    throw std::invalid_argument("bivariate covariance must satisfy |rho| < sigma2");
  }
  s.rho = rho;
  s.mean_mode = MeanMode::fixed;
  s.mean_x = mean_x;
  s.mean_y = mean_y;
  return Family(s);
}

Family Family::bivariate_gaussian_line(double sigma2, double rho, double base_x,
                                       double base_y, double dir_x, double dir_y) {
  Family f = bivariate_gaussian_fixed(sigma2, rho, base_x, base_y);
  if (dir_x == 0.0 && dir_y == 0.0) {
    throw std::invalid_argument("mean line direction must be nonzero");
  }
  f.spec_.mean_mode = MeanMode::line;
  f.spec_.dir_x = dir_x;
  f.spec_.dir_y = dir_y;
  return f;
}

Family Family::bivariate_gaussian_free(double sigma2, double rho) {
  Family f = bivariate_gaussian_fixed(sigma2, rho, 0.0, 0.0);
  f.spec_.mean_mode = MeanMode::free2;
  return f;
}

int Family::theta_dim() const {
  switch (spec_.kind) {
    case FamilyKind::gaussian:
    case FamilyKind::weibull:
    case FamilyKind::two_sided_weibull:
    case FamilyKind::lognormal:
      return 1;
    case FamilyKind::bivariate_gaussian:
      switch (spec_.mean_mode) {
        case MeanMode::fixed: return 0;
        case MeanMode::line: return 1;
        case MeanMode::free2: return 2;
      }
  }
  return 0;
}

void Family::theta_bounds(Vec& lo, Vec& hi) const {
  lo.assign(theta_dim(), -kParamCap);
  hi.assign(theta_dim(), kParamCap);
  if (spec_.kind == FamilyKind::weibull || spec_.kind == FamilyKind::two_sided_weibull) {
    lo[0] = kShapeFloor;
  }
}

std::string Family::name() const {
  switch (spec_.kind) {
    case FamilyKind::gaussian: return "gaussian";
    case FamilyKind::weibull: return "weibull";
    case FamilyKind::two_sided_weibull: return "two_sided_weibull";
    case FamilyKind::lognormal: return "lognormal";
    case FamilyKind::bivariate_gaussian: return "bivariate_gaussian";
  }
  return "unknown";
}

void Family::check_theta(std::span<const double> theta) const {
  if (static_cast<int>(theta.size()) != theta_dim()) {
    throw std::invalid_argument("theta has size " + std::to_string(theta.size()) +
                                ", expected " + std::to_string(theta_dim()) + " for " +
                                name());
  }
}

namespace {

struct BivMean {
  double x, y;
};

BivMean biv_mean(const Family::Spec& s, std::span<const double> theta) {
  switch (s.mean_mode) {
    case MeanMode::fixed: return {s.mean_x, s.mean_y};
    case MeanMode::line: return {s.mean_x + theta[0] * s.dir_x,
                                 s.mean_y + theta[0] * s.dir_y};
    case MeanMode::free2: return {theta[0], theta[1]};
  }
  return {0.0, 0.0};
}

}  // namespace

double Family::density(std::span<const double> theta, std::span<const double> x) const {
  check_theta(theta);
  switch (spec_.kind) {
    case FamilyKind::gaussian: {
      const double z = (x[0] - theta[0]) / spec_.sigma;
      return std::exp(-0.5 * z * z) / (spec_.sigma * kSqrtTwoPi);
    }
    case FamilyKind::weibull: {
      const double nu = theta[0];
      const double s = spec_.scale;
      if (x[0] < 0.0) return 0.0;
      if (x[0] == 0.0) {
        if (nu > 1.0) return 0.0;
        if (nu == 1.0) return 1.0 / s;
        return std::numeric_limits<double>::infinity();
      }
      const double r = x[0] / s;
      return (nu / s) * std::pow(r, nu - 1.0) * std::exp(-std::pow(r, nu));
    }
    case FamilyKind::two_sided_weibull: {
      const double nu = theta[0];
      const double s = spec_.scale;
      const double ax = std::fabs(x[0]);
      if (ax == 0.0) {
        if (nu > 1.0) return 0.0;
        if (nu == 1.0) return 0.5 / s;
        return std::numeric_limits<double>::infinity();
      }
      const double r = ax / s;
      return 0.5 * (nu / s) * std::pow(r, nu - 1.0) * std::exp(-std::pow(r, nu));
    }
    case FamilyKind::lognormal: {
      if (x[0] <= 0.0) return 0.0;
      const double z = (std::log(x[0]) - theta[0]) / spec_.sdlog;
      return std::exp(-0.5 * z * z) / (x[0] * spec_.sdlog * kSqrtTwoPi);
    }
    case FamilyKind::bivariate_gaussian: {
      const BivMean m = biv_mean(spec_, theta);
      const double det = spec_.sigma2 * spec_.sigma2 - spec_.rho * spec_.rho;
      const double ux = x[0] - m.x;
      const double uy = x[1] - m.y;
      const double q =
          (spec_.sigma2 * ux * ux - 2.0 * spec_.rho * ux * uy + spec_.sigma2 * uy * uy) /
          det;
      return std::exp(-0.5 * q) / (kTwoPi * std::sqrt(det));
    }
  }
  return 0.0;
}

Vec Family::density_grad_theta(std::span<const double> theta,
                               std::span<const double> x) const {
  check_theta(theta);
  const double p = density(theta, x);
  switch (spec_.kind) {
    case FamilyKind::gaussian:
      return {p * (x[0] - theta[0]) / (spec_.sigma * spec_.sigma)};
    case FamilyKind::weibull:
    case FamilyKind::two_sided_weibull: {
      const double ax = std::fabs(x[0]);
      if (ax <= 0.0 || p == 0.0) return {0.0};
      const double nu = theta[0];
      const double lr = std::log(ax / spec_.scale);
      const double rp = std::pow(ax / spec_.scale, nu);
      // d/dnu log p = 1/nu + log(x/s) (1 - (x/s)^nu)
      return {p * (1.0 / nu + lr * (1.0 - rp))};
    }
    case FamilyKind::lognormal: {
      if (x[0] <= 0.0) return {0.0};
      return {p * (std::log(x[0]) - theta[0]) / (spec_.sdlog * spec_.sdlog)};
    }
    case FamilyKind::bivariate_gaussian: {
      if (theta_dim() == 0) return {};
      const BivMean m = biv_mean(spec_, theta);
      const double det = spec_.sigma2 * spec_.sigma2 - spec_.rho * spec_.rho;
      const double ux = x[0] - m.x;
      const double uy = x[1] - m.y;
      // Sigma^-1 (x - m)
      const double gx = (spec_.sigma2 * ux - spec_.rho * uy) / det;
      const double gy = (spec_.sigma2 * uy - spec_.rho * ux) / det;
      if (spec_.mean_mode == MeanMode::line) {
        return {p * (gx * spec_.dir_x + gy * spec_.dir_y)};
      }
      return {p * gx, p * gy};
    }
  }
  return {};
}

double Family::moment(std::span<const double> theta, int order) const {
  check_theta(theta);
  if (order < 0) throw std::invalid_argument("moment order must be nonnegative");
  if (order == 0) return 1.0;
  switch (spec_.kind) {
    case FamilyKind::gaussian:
      return gaussian_raw_moment(theta[0], spec_.sigma * spec_.sigma, order);
    case FamilyKind::weibull:
      return std::pow(spec_.scale, order) * gamma_fn(1.0 + order / theta[0]);
    case FamilyKind::two_sided_weibull:
      if (order % 2 == 1) return 0.0;
      return std::pow(spec_.scale, order) * gamma_fn(1.0 + order / theta[0]);
    case FamilyKind::lognormal: {
      const double s = spec_.sdlog;
      return std::exp(order * theta[0] + 0.5 * order * order * s * s);
    }
    case FamilyKind::bivariate_gaussian:
      throw std::invalid_argument("univariate moment requested from a bivariate family");
  }
  return 0.0;
}

double Family::mixed_moment(std::span<const double> theta, int ax, int ay) const {
  if (spec_.kind != FamilyKind::bivariate_gaussian) {
    if (ay != 0) {
      throw std::invalid_argument("cross moment requested from a univariate family");
    }
    return moment(theta, ax);
  }
  check_theta(theta);
  if (ax < 0 || ay < 0 || ax > kMaxMixedOrder || ay > kMaxMixedOrder) {
    throw std::invalid_argument("mixed moment orders must be in [0, 16]");
  }
  const BivMean m = biv_mean(spec_, theta);
  const double s2 = spec_.sigma2;
  const double rho = spec_.rho;
  // Stein-type recursion on E[X^a Y^b]:
  //   m_{a,b} = mu_x m_{a-1,b} + (a-1) s2 m_{a-2,b} + b rho m_{a-1,b-1}
  // with the symmetric form in b used along the a = 0 edge.
  double t[kMaxMixedOrder + 1][kMaxMixedOrder + 1];
  for (int a = 0; a <= ax; ++a) {
    for (int b = 0; b <= ay; ++b) {
      if (a == 0 && b == 0) {
        t[a][b] = 1.0;
      } else if (a == 0) {
        t[a][b] = m.y * t[0][b - 1] + (b >= 2 ? (b - 1) * s2 * t[0][b - 2] : 0.0);
      } else {
        t[a][b] = m.x * t[a - 1][b] + (a >= 2 ? (a - 1) * s2 * t[a - 2][b] : 0.0) +
                  (b >= 1 ? b * rho * t[a - 1][b - 1] : 0.0);
      }
    }
  }
  return t[ax][ay];
}

double Family::cdf(std::span<const double> theta, double x) const {
  check_theta(theta);
  switch (spec_.kind) {
    case FamilyKind::gaussian:
      return std_normal_cdf((x - theta[0]) / spec_.sigma);
    case FamilyKind::weibull:
      if (x <= 0.0) return 0.0;
      return 1.0 - std::exp(-std::pow(x / spec_.scale, theta[0]));
    case FamilyKind::two_sided_weibull:
      if (x >= 0.0) return 1.0 - 0.5 * std::exp(-std::pow(x / spec_.scale, theta[0]));
      return 0.5 * std::exp(-std::pow(-x / spec_.scale, theta[0]));
    case FamilyKind::lognormal:
      if (x <= 0.0) return 0.0;
      return std_normal_cdf((std::log(x) - theta[0]) / spec_.sdlog);
    case FamilyKind::bivariate_gaussian:
      throw std::invalid_argument("scalar cdf requested from a bivariate family");
  }
  return 0.0;
}

void Family::draw(CounterRng& rng, std::span<const double> theta, double* out) const {
  check_theta(theta);
  switch (spec_.kind) {
    case FamilyKind::gaussian:
      out[0] = theta[0] + spec_.sigma * rng.next_normal();
      return;
    case FamilyKind::weibull: {
      const double u = rng.next_unit();
      out[0] = spec_.scale * std::pow(-std::log(1.0 - u), 1.0 / theta[0]);
      return;
    }
    case FamilyKind::two_sided_weibull: {
      const double u = rng.next_unit();
      const double inv = 1.0 / theta[0];
      if (u < 0.5) {
        out[0] = -spec_.scale * std::pow(-std::log(2.0 * u), inv);
      } else {
        out[0] = spec_.scale * std::pow(-std::log(2.0 * (1.0 - u)), inv);
      }
      return;
    }
    case FamilyKind::lognormal:
      out[0] = std::exp(theta[0] + spec_.sdlog * rng.next_normal());
      return;
    case FamilyKind::bivariate_gaussian: {
      const BivMean m = biv_mean(spec_, theta);
      // Cholesky factor of [[s2, rho], [rho, s2]].
      const double l11 = std::sqrt(spec_.sigma2);
      const double l21 = spec_.rho / l11;
      const double l22 = std::sqrt(spec_.sigma2 - l21 * l21);
      const double z1 = rng.next_normal();
      const double z2 = rng.next_normal();
      out[0] = m.x + l11 * z1;
      out[1] = m.y + l21 * z1 + l22 * z2;
      return;
    }
  }
}

Dataset Family::sample(std::span<const double> theta, std::size_t n, std::uint64_t seed,
                       std::uint64_t stream) const {
  if (n == 0) throw std::invalid_argument("sample size must be positive");
  Dataset data;
  data.dim = dim();
  data.values.resize(n * static_cast<std::size_t>(data.dim));
  CounterRng rng(seed, stream);
  for (std::size_t i = 0; i < n; ++i) {
    draw(rng, theta, data.values.data() + i * static_cast<std::size_t>(data.dim));
  }
  return data;
}

std::pair<double, double> Family::integration_range(std::span<const double> theta,
                                                    int axis) const {
  check_theta(theta);
  // log(1e-16) ~ -36.84: tail mass past the cut is ~1e-16.
  constexpr double kLogTail = 36.841361487904734;
  constexpr double kNormalCut = 13.5;
  switch (spec_.kind) {
    case FamilyKind::gaussian:
      return {theta[0] - kNormalCut * spec_.sigma, theta[0] + kNormalCut * spec_.sigma};
    case FamilyKind::weibull:
      return {0.0, spec_.scale * std::pow(kLogTail, 1.0 / theta[0])};
    case FamilyKind::two_sided_weibull: {
      const double hi = spec_.scale * std::pow(kLogTail, 1.0 / theta[0]);
      return {-hi, hi};
    }
    case FamilyKind::lognormal:
      return {std::exp(theta[0] - 8.5 * spec_.sdlog),
              std::exp(theta[0] + 8.5 * spec_.sdlog)};
    case FamilyKind::bivariate_gaussian: {
      const BivMean m = biv_mean(spec_, theta);
      const double c = (axis == 0) ? m.x : m.y;
      const double sd = std::sqrt(spec_.sigma2);
      return {c - kNormalCut * sd, c + kNormalCut * sd};
    }
  }
  return {0.0, 0.0};
}

}  // namespace dualmix
