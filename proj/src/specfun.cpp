#include "bgmo/specfun.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bgmo/error.hpp"

namespace bgmo::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be a positive finite number");
  }
}

// Continued fraction for I_x(a, b) / front factor (modified Lentz).
double beta_cf(double x, double a, double b, const ToleranceConfig& tol) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  double last_change = 1.0;
  for (int it = 1; it <= tol.max_iter; ++it) {
    const double m = it;
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    last_change = std::fabs(del - 1.0);
    if (last_change <= kEps) return h;
  }
  if (last_change > tol.rel_tol) {
    throw NumericError("incomplete beta continued fraction did not converge", h);
  }
  return h;
}

// I_x(a, b) evaluated directly by the continued fraction (no switch).
double direct_tail(double x, double y, double a, double b, const ToleranceConfig& tol) {
  const double log_front = a * std::log(x) + b * std::log(y) - log_beta(a, b) - std::log(a);
  const double front = std::exp(log_front);
  if (front == 0.0) return 0.0;
  try {
    return front * beta_cf(x, a, b, tol);
  } catch (const NumericError& e) {
    throw NumericError(e.what(), front * e.best_estimate());
  }
}

// Root of I_x(a, b) = p on [0, 0.5] (caller guarantees it lies there).
double solve_lower_half(double p, double pc, double a, double b, const ToleranceConfig& tol) {
  const double lnb = log_beta(a, b);
  const bool use_lower = p <= 0.5;
  auto residual = [&](double x) {
    const BetaTails t = reg_inc_beta_tails(x, 1.0 - x, a, b, tol);
    return use_lower ? t.lower - p : pc - t.upper;
  };
  auto density = [&](double x) {
    return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - lnb);
  };

  double lo = 0.0;
  double hi = 0.5;
  double x = std::exp((std::log(p) + std::log(a) + lnb) / a);
  if (!(x > lo && x < hi) || !std::isfinite(x)) x = 0.25;

  const int budget = std::max(tol.max_iter, 300);
  for (int it = 0; it < budget; ++it) {
    const double r = residual(x);
    if (r == 0.0) return x;
    if (r < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    double next = x - r / density(x);
    if (!(next > lo && next < hi) || !std::isfinite(next)) {
      if (lo == 0.0) {
        next = hi / 16.0;
      } else if (hi / lo > 8.0) {
        next = std::sqrt(lo * hi);
      } else {
        next = 0.5 * (lo + hi);
      }
    }
    if (std::fabs(next - x) <= 4.0 * kEps * x || hi - lo <= 4.0 * kEps * hi) return next;
    x = next;
  }
  throw NumericError("beta quantile iteration did not converge", x);
}

}  // namespace

void ToleranceConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_iter < 1) {
    throw DomainError("tolerance configuration requires abs_tol > 0, rel_tol > 0, max_iter >= 1");
  }
}

double log_gamma(double x) {
  require_positive(x, "log_gamma argument");
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

double log_beta(double m, double n) {
  require_positive(m, "log_beta first argument");
  require_positive(n, "log_beta second argument");
  return log_gamma(m) + log_gamma(n) - log_gamma(m + n);
}

BetaTails reg_inc_beta_tails(double x, double y, double m, double n, const ToleranceConfig& tol) {
  require_positive(m, "incomplete beta shape m");
  require_positive(n, "incomplete beta shape n");
  if (!(x >= 0.0 && x <= 1.0) || !(y >= 0.0 && y <= 1.0)) {
    throw DomainError("incomplete beta argument must lie in [0, 1]");
  }
  if (x == 0.0 || y == 1.0) return {0.0, 1.0};
  if (y == 0.0 || x == 1.0) return {1.0, 0.0};
  if (x <= m / (m + n)) {
    const double lower = direct_tail(x, y, m, n, tol);
    return {lower, 1.0 - lower};
  }
  const double upper = direct_tail(y, x, n, m, tol);
  return {1.0 - upper, upper};
}

double reg_inc_beta(double x, double m, double n, const ToleranceConfig& tol) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete beta argument must lie in [0, 1]");
  return reg_inc_beta_tails(x, 1.0 - x, m, n, tol).lower;
}

BetaRoot beta_quantile_tails(double u, double u_comp, double m, double n,
                             const ToleranceConfig& tol) {
  require_positive(m, "beta quantile shape m");
  require_positive(n, "beta quantile shape n");
  if (!(u >= 0.0 && u <= 1.0) || !(u_comp >= 0.0 && u_comp <= 1.0)) {
    throw DomainError("beta quantile probability must lie in [0, 1]");
  }
  if (u == 0.0) return {0.0, 1.0};
  if (u_comp == 0.0) return {1.0, 0.0};

  const BetaTails half = reg_inc_beta_tails(0.5, 0.5, m, n, tol);
  const bool lower_half = (u <= 0.5) ? (u <= half.lower) : (u_comp >= half.upper);
  if (lower_half) {
    const double z = solve_lower_half(u, u_comp, m, n, tol);
    return {z, 1.0 - z};
  }
  const double zc = solve_lower_half(u_comp, u, n, m, tol);
  return {1.0 - zc, zc};
}

double beta_quantile(double u, double m, double n, const ToleranceConfig& tol) {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("beta quantile probability must lie in [0, 1]");
  return beta_quantile_tails(u, 1.0 - u, m, n, tol).z;
}

double beta_quantile_series(double u, double m, double n, int order) {
  require_positive(m, "beta quantile series shape m");
  require_positive(n, "beta quantile series shape n");
  if (!(u > 0.0 && u < 1.0)) throw DomainError("beta quantile series needs u in (0, 1)");
  if (order < 1 || order > 4) throw DomainError("beta quantile series order must be in [1, 4]");

  const double m2 = m * m;
  const double d[5] = {
      0.0,
      1.0,
      (n - 1.0) / (m + 1.0),
      (n - 1.0) * (m2 + 3.0 * m * n - m + 5.0 * n - 4.0) /
          (2.0 * (m + 1.0) * (m + 1.0) * (m + 2.0)),
      (n - 1.0) *
          (m2 * m2 + (6.0 * n - 1.0) * m2 * m + (n + 2.0) * (8.0 * n - 5.0) * m2 +
           (33.0 * n * n - 30.0 * n + 4.0) * m + n * (31.0 * n - 47.0) + 18.0) /
          (3.0 * std::pow(m + 1.0, 3) * (m + 2.0) * (m + 3.0)),
  };
  // e_i u^{i/m} = d_i [u m B(m, n)]^{i/m}
  const double w = std::exp((std::log(u) + std::log(m) + log_beta(m, n)) / m);
  double sum = 0.0;
  double power = 1.0;
  for (int i = 1; i <= order; ++i) {
    power *= w;
    sum += d[i] * power;
  }
  return sum;
}

double digamma(double x) {
  require_positive(x, "digamma argument");
  double result = 0.0;
  while (x < 10.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Bernoulli-number tail of the asymptotic expansion.
  const double tail =
      inv2 * (1.0 / 12.0 -
              inv2 * (1.0 / 120.0 -
                      inv2 * (1.0 / 252.0 -
                              inv2 * (1.0 / 240.0 -
                                      inv2 * (1.0 / 132.0 -
                                              inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
  return result + std::log(x) - 0.5 * inv - tail;
}

double binomial(double a, int k) {
  if (k < 0) return 0.0;
  double c = 1.0;
  for (int i = 0; i < k; ++i) c *= (a - i) / (i + 1.0);
  return c;
}

bool is_integer(double x) {
  return std::fabs(x - std::round(x)) <= 1e-12 * std::max(1.0, std::fabs(x));
}

}  // namespace bgmo::specfun
