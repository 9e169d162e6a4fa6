#pragma once

// Special functions used throughout the library: log-beta, the regularized
// incomplete beta ratio and its inverse, digamma, and the small-u power
// series of the beta quantile.

namespace bgmo::specfun {

struct ToleranceConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_iter = 200;

  // Throws DomainError when a field is non-positive.
  void validate() const;
};

// ln B(m, n).
double log_beta(double m, double n);

// ln Γ(x) for x > 0 without touching the global signgam.
double log_gamma(double x);

// I_x(m, n) together with its complement 1 - I_x(m, n), each computed to
// full relative precision. `x` and `y` must satisfy x + y = 1; passing them
// separately lets callers keep precision when one of them is tiny.
struct BetaTails {
  double lower;  // I_x(m, n)
  double upper;  // 1 - I_x(m, n) = I_y(n, m)
};

BetaTails reg_inc_beta_tails(double x, double y, double m, double n,
                             const ToleranceConfig& tol = {});

// I_x(m, n). Lentz continued fraction with the usual symmetry switch.
double reg_inc_beta(double x, double m, double n, const ToleranceConfig& tol = {});

// Inverse of I_x(m, n) in x. Both the root and its complement are returned
// because downstream quantiles need 1 - z to full precision near z = 1.
struct BetaRoot {
  double z;       // I_z(m, n) = u
  double z_comp;  // 1 - z
};

// Solves I_z(m, n) = u given u and its complement u_comp = 1 - u.
BetaRoot beta_quantile_tails(double u, double u_comp, double m, double n,
                             const ToleranceConfig& tol = {});

double beta_quantile(double u, double m, double n, const ToleranceConfig& tol = {});

// Truncated power series Σ_{i=1}^{order} e_i u^{i/m} of the beta quantile
// about u = 0, with e_i = d_i [m B(m, n)]^{i/m}. order ∈ [1, 4].
double beta_quantile_series(double u, double m, double n, int order);

// ψ(x) for x > 0.
double digamma(double x);

// Generalized binomial coefficient C(a, k) for real a and integer k ≥ 0.
double binomial(double a, int k);

// True when x is within 1e-12 (relative) of an integer.
bool is_integer(double x);

}  // namespace bgmo::specfun
