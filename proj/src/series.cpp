#include "bgmo/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bgmo/error.hpp"

namespace bgmo::series {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using specfun::binomial;
using specfun::is_integer;

double scaled_log(double a, double log_x) { return a == 0.0 ? 0.0 : a * log_x; }

bool is_nonneg_integer(double x) { return x > -0.5 && is_integer(x); }

int as_int(double x) { return static_cast<int>(std::lround(x)); }

// Running sum with the policy's stopping rule. Finite sums are summed in
// full; infinite ones stop once a term drops below tail_tol·|sum|.
class Accumulator {
 public:
  Accumulator(const TruncationPolicy& policy, bool finite) : policy_(policy), finite_(finite) {}

  // Returns false once the sum has converged and further terms are moot.
  bool add(double term) {
    sum_ += term;
    last_ = std::fabs(term);
    if (!finite_ && last_ <= policy_.tail_tol * std::fabs(sum_)) {
      done_ = true;
      return false;
    }
    return true;
  }

  SeriesValue result() const {
    SeriesValue out;
    out.value = sum_;
    out.residual = finite_ ? 0.0 : last_;
    out.converged = finite_ || done_;
    return out;
  }

 private:
  const TruncationPolicy& policy_;
  bool finite_;
  bool done_ = false;
  double sum_ = 0.0;
  double last_ = 0.0;
};

// Truncated product of two power series, keeping `size` coefficients.
std::vector<double> cauchy(const std::vector<double>& a, const std::vector<double>& b,
                           std::size_t size) {
  std::vector<double> out(size, 0.0);
  for (std::size_t i = 0; i < a.size() && i < size; ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size() && i + j < size; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

std::vector<double> series_power(const std::vector<double>& a, int e, std::size_t size) {
  std::vector<double> out(size, 0.0);
  out[0] = 1.0;
  for (int i = 0; i < e; ++i) out = cauchy(out, a, size);
  return out;
}

void require_integer_m(const BgmoParams& p, const char* what) {
  if (!is_integer(p.m)) {
    throw PreconditionError(std::string(what) + " requires an integer shape m");
  }
}

// Exact degree of the χ polynomial when m, n and θ are all integers, else -1.
int chi_degree(const BgmoParams& p) {
  if (is_integer(p.m) && is_integer(p.n) && is_integer(p.theta)) {
    return as_int(p.theta) * (as_int(p.m) + as_int(p.n) - 1);
  }
  return -1;
}

std::vector<double> chi_coeffs(const BgmoParams& p, const TruncationPolicy& policy) {
  require_integer_m(p, "the chi-series");
  const int m = as_int(p.m);
  const int degree = chi_degree(p);
  const std::size_t size =
      degree >= 0 ? static_cast<std::size_t>(degree) + 1 : static_cast<std::size_t>(policy.max_terms);
  // y(x) = 1 - (1 - x)^θ = x·Y(x).
  std::vector<double> Y(size, 0.0);
  for (std::size_t k = 0; k < size; ++k) {
    const int e = static_cast<int>(k) + 1;
    Y[k] = -binomial(p.theta, e) * ((e % 2 == 0) ? 1.0 : -1.0);
  }
  // F = Σ_i c_i y^{m+i} with c_i = (-1)^i C(n-1, i) / (B(m,n)(m+i)).
  const double log_b = specfun::log_beta(p.m, p.n);
  std::vector<double> chi(size, 0.0);
  if (static_cast<std::size_t>(m) >= size) return chi;
  std::vector<double> power = series_power(Y, m, size);
  for (std::size_t i = 0; m + i < size; ++i) {
    const double c = ((i % 2 == 0) ? 1.0 : -1.0) * binomial(p.n - 1.0, static_cast<int>(i)) *
                     std::exp(-log_b) / (p.m + static_cast<double>(i));
    if (c != 0.0) {
      for (std::size_t k = 0; m + i + k < size; ++k) chi[m + i + k] += c * power[k];
    }
    power = cauchy(power, Y, size);
  }
  return chi;
}

std::vector<double> phi_coeffs(const BgmoParams& p, const DeltaCoeffs& dc,
                               const TruncationPolicy& policy, bool* finite) {
  bool all_int = dc.finite;
  int max_degree = 0;
  for (std::size_t j = 0; j < dc.delta.size(); ++j) {
    const double c = p.theta * (static_cast<double>(j) + p.n) - 1.0;
    if (!is_nonneg_integer(c)) {
      all_int = false;
    } else {
      max_degree = std::max(max_degree, as_int(c));
    }
  }
  if (finite) *finite = all_int;
  const std::size_t size =
      all_int ? static_cast<std::size_t>(max_degree) + 1 : static_cast<std::size_t>(policy.max_terms);
  std::vector<double> phi(size, 0.0);
  for (std::size_t j = 0; j < dc.delta.size(); ++j) {
    const double c = p.theta * (static_cast<double>(j) + p.n) - 1.0;
    for (std::size_t l = 0; l < size; ++l) {
      const double sign = (l % 2 == 0) ? 1.0 : -1.0;
      phi[l] += dc.delta[j] * sign * binomial(c, static_cast<int>(l));
    }
  }
  return phi;
}

std::vector<std::vector<std::vector<double>>> psi_coeffs(const BgmoParams& p,
                                                         const TruncationPolicy& policy) {
  if (!is_integer(p.m) || !is_integer(p.n)) {
    throw PreconditionError("the psi-series requires integer shapes m and n");
  }
  const int m = as_int(p.m);
  const int n = as_int(p.n);
  const int total = m + n - 1;
  std::vector<std::vector<std::vector<double>>> psi;
  for (int pp = m; pp <= total; ++pp) {
    std::vector<std::vector<double>> by_q;
    for (int q = 0; q <= pp; ++q) {
      const double e = p.theta * (total - pp + q);
      const int count = is_nonneg_integer(e) ? as_int(e) + 1 : policy.max_terms;
      std::vector<double> by_r(static_cast<std::size_t>(count));
      for (int r = 0; r < count; ++r) {
        const double sign = ((q + r) % 2 == 0) ? 1.0 : -1.0;
        by_r[static_cast<std::size_t>(r)] =
            sign * binomial(pp, q) * binomial(total, pp) * binomial(e, r);
      }
      by_q.push_back(std::move(by_r));
    }
    psi.push_back(std::move(by_q));
  }
  return psi;
}

double pow_from_log(double e, double log_x) { return std::exp(scaled_log(e, log_x)); }

}  // namespace

void TruncationPolicy::validate() const {
  if (max_terms < 1 || !(tail_tol > 0.0)) {
    throw DomainError("truncation policy requires max_terms >= 1 and tail_tol > 0");
  }
}

DeltaCoeffs delta_coeffs(double m, double n, double theta, const TruncationPolicy& policy) {
  BgmoParams{m, n, theta, 1.0}.validate();
  policy.validate();
  DeltaCoeffs out;
  out.finite = is_integer(m);
  const int count = out.finite ? as_int(m) : policy.max_terms;
  const double inv_b = std::exp(-specfun::log_beta(m, n));
  for (int j = 0; j < count; ++j) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    const double d = sign * theta * binomial(m - 1.0, j) * inv_b;
    out.delta.push_back(d);
    out.delta_prime.push_back(-d / (theta * (j + n)));
  }
  return out;
}

ExpansionCoeffs expansion_coeffs(const BgmoParams& p, const TruncationPolicy& policy) {
  ExpansionCoeffs out;
  const DeltaCoeffs dc = delta_coeffs(p.m, p.n, p.theta, policy);
  out.delta = dc.delta;
  out.delta_prime = dc.delta_prime;
  out.finite_delta = dc.finite;
  out.phi = phi_coeffs(p, dc, policy, &out.finite_phi);
  if (is_integer(p.m)) out.chi = chi_coeffs(p, policy);
  if (is_integer(p.m) && is_integer(p.n)) out.psi = psi_coeffs(p, policy);
  return out;
}

SeriesValue pdf_via_expansion(const BgmoDistribution& d, double t, PdfForm form,
                              const TruncationPolicy& policy) {
  const BgmoParams& p = d.params();
  const MoTerms mo = mo_terms(p.alpha, d.baseline(), t);
  if (mo.log_f_mo == -kInf) return {};
  const DeltaCoeffs dc = delta_coeffs(p.m, p.n, p.theta, policy);
  const double f_mo = std::exp(mo.log_f_mo);

  if (form == PdfForm::SurvivalPowers) {
    Accumulator acc(policy, dc.finite);
    for (std::size_t j = 0; j < dc.delta.size(); ++j) {
      const double e = p.theta * (static_cast<double>(j) + p.n) - 1.0;
      if (!acc.add(dc.delta[j] * pow_from_log(e, mo.log_s))) break;
    }
    SeriesValue out = acc.result();
    out.value *= f_mo;
    out.residual *= f_mo;
    return out;
  }

  bool finite = false;
  const std::vector<double> phi = phi_coeffs(p, dc, policy, &finite);
  Accumulator acc(policy, finite);
  for (std::size_t l = 0; l < phi.size(); ++l) {
    if (!acc.add(phi[l] * pow_from_log(static_cast<double>(l), mo.log_s_comp))) break;
  }
  SeriesValue out = acc.result();
  out.value *= f_mo;
  out.residual *= f_mo;
  return out;
}

SeriesValue cdf_via_expansion(const BgmoDistribution& d, double t, CdfForm form,
                              const TruncationPolicy& policy) {
  policy.validate();
  const BgmoParams& p = d.params();
  const MoTerms mo = mo_terms(p.alpha, d.baseline(), t);
  const double x = std::exp(mo.log_s_comp);

  if (form == CdfForm::ChiSeries) {
    const std::vector<double> chi = chi_coeffs(p, policy);
    SeriesValue out;
    double xk = 1.0;
    for (double c : chi) {
      out.residual = std::fabs(c * xk);
      out.value += c * xk;
      xk *= x;
    }
    if (chi_degree(p) >= 0) {
      out.residual = 0.0;
    } else {
      out.converged = out.residual <= policy.tail_tol * std::fabs(out.value);
    }
    return out;
  }

  const auto psi = psi_coeffs(p, policy);
  bool finite = true;
  SeriesValue out;
  for (const auto& by_q : psi) {
    for (const auto& by_r : by_q) {
      double xr = 1.0;
      double last = 0.0;
      for (double c : by_r) {
        last = c * xr;
        out.value += last;
        xr *= x;
      }
      if (static_cast<int>(by_r.size()) == policy.max_terms) {
        finite = false;
        out.residual = std::max(out.residual, std::fabs(last));
      }
    }
  }
  out.converged = finite || out.residual <= policy.tail_tol * std::fabs(out.value);
  return out;
}

OrderStatCoeffs order_stat_coeffs(const BgmoParams& p, int r, int sample_n,
                                  const TruncationPolicy& policy) {
  if (sample_n < 1 || r < 1 || r > sample_n) {
    throw DomainError("order statistic needs 1 <= r <= sample_n");
  }
  require_integer_m(p, "the order-statistic series");
  const DeltaCoeffs dc = delta_coeffs(p.m, p.n, p.theta, policy);
  bool phi_finite = false;
  const std::vector<double> phi = phi_coeffs(p, dc, policy, &phi_finite);
  const std::vector<double> chi = chi_coeffs(p, policy);
  const int chi_deg = chi_degree(p);

  std::size_t size = static_cast<std::size_t>(policy.max_terms);
  if (phi_finite && chi_deg >= 0) {
    size = static_cast<std::size_t>(chi_deg * (sample_n - 1)) + 1;
  }

  OrderStatCoeffs out;
  std::vector<double> power = series_power(chi, r - 1, size);
  for (int e = 0; e <= sample_n - r; ++e) {
    out.d_table.push_back(power);
    power = cauchy(power, chi, size);
  }
  const double log_coef = std::lgamma(sample_n + 1.0) - std::lgamma(static_cast<double>(r)) -
                          std::lgamma(sample_n - r + 1.0);
  const double coef = std::exp(log_coef);
  out.xi.assign(phi.size(), std::vector<double>(size, 0.0));
  for (int j = 0; j <= sample_n - r; ++j) {
    const double w = coef * ((j % 2 == 0) ? 1.0 : -1.0) * binomial(sample_n - r, j);
    for (std::size_t l = 0; l < phi.size(); ++l) {
      for (std::size_t k = 0; k < size; ++k) {
        out.xi[l][k] += w * phi[l] * out.d_table[static_cast<std::size_t>(j)][k];
      }
    }
  }
  return out;
}

namespace {

// Collapses ξ_{l,k} onto the combined power x^{l+k}, keeping the first
// `limit` powers (all of them when the tables are exact).
std::vector<double> collapse_xi(const OrderStatCoeffs& c, std::size_t limit) {
  std::vector<double> out;
  for (std::size_t l = 0; l < c.xi.size(); ++l) {
    for (std::size_t k = 0; k < c.xi[l].size(); ++k) {
      if (l + k >= limit) break;
      if (l + k >= out.size()) out.resize(l + k + 1, 0.0);
      out[l + k] += c.xi[l][k];
    }
  }
  return out;
}

std::size_t xi_limit(const BgmoParams& p, int sample_n, const TruncationPolicy& policy) {
  const DeltaCoeffs dc = delta_coeffs(p.m, p.n, p.theta, policy);
  bool phi_finite = false;
  phi_coeffs(p, dc, policy, &phi_finite);
  if (phi_finite && chi_degree(p) >= 0) return std::numeric_limits<std::size_t>::max();
  (void)sample_n;
  return static_cast<std::size_t>(policy.max_terms);
}

}  // namespace

double order_stat_pdf(const BgmoDistribution& d, int r, int sample_n, double t,
                      OrderMethod method, const TruncationPolicy& policy) {
  if (sample_n < 1 || r < 1 || r > sample_n) {
    throw DomainError("order statistic needs 1 <= r <= sample_n");
  }
  if (method == OrderMethod::Direct) {
    const double log_f = d.log_pdf(t);
    if (log_f == -kInf) return 0.0;
    const double log_coef = std::lgamma(sample_n + 1.0) - std::lgamma(static_cast<double>(r)) -
                            std::lgamma(sample_n - r + 1.0);
    const double log_cdf = std::log(d.cdf(t));
    const double log_sf = std::log(d.sf(t));
    return std::exp(log_coef + log_f + scaled_log(r - 1.0, log_cdf) +
                    scaled_log(static_cast<double>(sample_n - r), log_sf));
  }
  const BgmoParams& p = d.params();
  const MoTerms mo = mo_terms(p.alpha, d.baseline(), t);
  if (mo.log_f_mo == -kInf) return 0.0;
  const OrderStatCoeffs c = order_stat_coeffs(p, r, sample_n, policy);
  const std::vector<double> coeffs = collapse_xi(c, xi_limit(p, sample_n, policy));
  const double x = std::exp(mo.log_s_comp);
  double sum = 0.0;
  double xk = 1.0;
  for (double a : coeffs) {
    sum += a * xk;
    xk *= x;
  }
  return std::exp(mo.log_f_mo) * sum;
}

double pwm_mo(double alpha, const Baseline& b, int p, double q, double r) {
  if (!(alpha > 0.0)) throw DomainError("MO tilt alpha must be positive");
  if (p < 0 || !(q > -1.0) || !(r > -1.0)) {
    throw DomainError("PWM indices need p >= 0 and q, r > -1");
  }
  const double log_alpha = std::log(alpha);
  auto fn = [&](double t, double) {
    const MoTerms mo = mo_terms(alpha, b, t);
    const double log_part =
        scaled_log(q, mo.log_s_comp) + scaled_log(r, mo.log_s) + log_alpha - 2.0 * mo.log_D;
    return std::pow(t, p) * std::exp(log_part);
  };
  check_upper_tail(b, fn, "probability weighted moment");
  return integrate_over_support(b, fn).value;
}

SeriesValue moment_series(const BgmoDistribution& d, int s, const TruncationPolicy& policy) {
  if (s < 1) throw DomainError("moment order must be a positive integer");
  const BgmoParams& p = d.params();
  const DeltaCoeffs dc = delta_coeffs(p.m, p.n, p.theta, policy);
  Accumulator acc(policy, dc.finite);
  for (std::size_t j = 0; j < dc.delta.size(); ++j) {
    const double e = p.theta * (static_cast<double>(j) + p.n) - 1.0;
    if (!acc.add(dc.delta[j] * pwm_mo(p.alpha, d.baseline(), s, 0.0, e))) break;
  }
  return acc.result();
}

double moment_direct(const BgmoDistribution& d, int s) {
  if (s < 1) throw DomainError("moment order must be a positive integer");
  auto fn = [&](double t, double log_g) { return std::pow(t, s) * std::exp(d.log_pdf(t) - log_g); };
  check_upper_tail(d.baseline(), fn, "moment");
  return integrate_over_support(d.baseline(), fn).value;
}

SeriesValue order_stat_moment(const BgmoDistribution& d, int r, int sample_n, int s,
                              const TruncationPolicy& policy) {
  if (s < 1) throw DomainError("moment order must be a positive integer");
  const BgmoParams& p = d.params();
  const OrderStatCoeffs c = order_stat_coeffs(p, r, sample_n, policy);
  const std::size_t limit = xi_limit(p, sample_n, policy);
  const std::vector<double> coeffs = collapse_xi(c, limit);
  SeriesValue out;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (coeffs[k] == 0.0) continue;
    const double term = coeffs[k] * pwm_mo(p.alpha, d.baseline(), s, static_cast<double>(k), 0.0);
    out.value += term;
    out.residual = std::fabs(term);
  }
  if (limit == std::numeric_limits<std::size_t>::max()) {
    out.residual = 0.0;
  } else {
    out.converged = out.residual <= policy.tail_tol * std::fabs(out.value);
  }
  return out;
}

double order_stat_moment_direct(const BgmoDistribution& d, int r, int sample_n, int s) {
  if (s < 1) throw DomainError("moment order must be a positive integer");
  auto fn = [&](double t, double log_g) {
    const double f = order_stat_pdf(d, r, sample_n, t, OrderMethod::Direct);
    return f == 0.0 ? 0.0 : std::pow(t, s) * std::exp(std::log(f) - log_g);
  };
  check_upper_tail(d.baseline(), fn, "order-statistic moment");
  return integrate_over_support(d.baseline(), fn).value;
}

double mgf(const BgmoDistribution& d, double s) {
  if (s == 0.0) return 1.0;
  auto fn = [&](double t, double log_g) { return std::exp(s * t + d.log_pdf(t) - log_g); };
  if (s > 0.0) check_upper_tail(d.baseline(), fn, "moment generating function (upper tail)");
  return integrate_over_support(d.baseline(), fn).value;
}

SeriesValue mgf_series(const BgmoDistribution& d, double s, const TruncationPolicy& policy) {
  const BgmoParams& p = d.params();
  const DeltaCoeffs dc = delta_coeffs(p.m, p.n, p.theta, policy);
  const Baseline& b = d.baseline();
  Accumulator acc(policy, dc.finite);
  for (std::size_t j = 0; j < dc.delta.size(); ++j) {
    const double c = p.theta * (static_cast<double>(j) + p.n);
    // M_{X_j}(s) for the exponentiated-MO component with survival s^c.
    auto fn = [&](double t, double) {
      const MoTerms mo = mo_terms(p.alpha, b, t);
      return std::exp(s * t + std::log(c) + scaled_log(c - 1.0, mo.log_s) + std::log(p.alpha) -
                      2.0 * mo.log_D);
    };
    if (s > 0.0) check_upper_tail(b, fn, "moment generating function (upper tail)");
    const double component = integrate_over_support(b, fn).value;
    if (!acc.add(-dc.delta_prime[j] * component)) break;
  }
  return acc.result();
}

SeriesValue renyi_entropy(const BgmoDistribution& d, double delta, const TruncationPolicy& policy) {
  if (!(delta > 0.0) || delta == 1.0) throw DomainError("Renyi order must be positive and != 1");
  policy.validate();
  const BgmoParams& p = d.params();
  const Baseline& b = d.baseline();
  const double c = delta * (p.m - 1.0);
  const bool finite = is_nonneg_integer(c);
  const int count = finite ? as_int(c) + 1 : policy.max_terms;
  const double log_scale = delta * (std::log(p.theta) - d.log_beta_mn());
  Accumulator acc(policy, finite);
  for (int j = 0; j < count; ++j) {
    const double z = ((j % 2 == 0) ? 1.0 : -1.0) * binomial(c, j) * std::exp(log_scale);
    const double e = p.theta * j + delta * (p.theta * p.n - 1.0);
    auto fn = [&](double t, double log_g) {
      const MoTerms mo = mo_terms(p.alpha, b, t);
      return std::exp(delta * mo.log_f_mo + scaled_log(e, mo.log_s) - log_g);
    };
    check_upper_tail(b, fn, "Renyi entropy");
    if (!acc.add(z * integrate_over_support(b, fn).value)) break;
  }
  SeriesValue out = acc.result();
  if (!(out.value > 0.0)) throw NumericError("Renyi series sum is not positive", out.value);
  out.residual = out.residual / (std::fabs(1.0 - delta) * out.value);
  out.value = std::log(out.value) / (1.0 - delta);
  return out;
}

double renyi_entropy_direct(const BgmoDistribution& d, double delta) {
  if (!(delta > 0.0) || delta == 1.0) throw DomainError("Renyi order must be positive and != 1");
  auto fn = [&](double t, double log_g) { return std::exp(delta * d.log_pdf(t) - log_g); };
  check_upper_tail(d.baseline(), fn, "Renyi entropy");
  return std::log(integrate_over_support(d.baseline(), fn).value) / (1.0 - delta);
}

Asymptote::Asymptote(const BgmoDistribution& d, TailEnd end)
    : p_(d.params()), b_(d.baseline()), end_(end), log_beta_(d.log_beta_mn()) {}

double Asymptote::pdf(double t) const {
  const double lg = b_.log_pdf(t);
  if (end_ == TailEnd::UpperTail) {
    const double tn = p_.theta * p_.n;
    return std::exp(std::log(p_.theta) + tn * std::log(p_.alpha) + lg +
                    scaled_log(tn - 1.0, b_.log_sf(t)) - log_beta_);
  }
  return std::exp(p_.m * std::log(p_.theta) + lg + scaled_log(p_.m - 1.0, b_.log_cdf(t)) -
                  log_beta_ - p_.m * std::log(p_.alpha));
}

double Asymptote::tail_probability(double t) const {
  if (end_ == TailEnd::UpperTail) {
    const double tn = p_.theta * p_.n;
    return std::exp(tn * (std::log(p_.alpha) + b_.log_sf(t)) - std::log(p_.n) - log_beta_);
  }
  return std::exp(p_.m * (std::log(p_.theta) + b_.log_cdf(t) - std::log(p_.alpha)) -
                  std::log(p_.m) - log_beta_);
}

double Asymptote::hazard(double t) const {
  if (end_ == TailEnd::UpperTail) {
    return p_.theta * p_.n * std::exp(b_.log_pdf(t) - b_.log_sf(t));
  }
  return pdf(t);
}

Asymptote asymptote(const BgmoDistribution& d, TailEnd end) { return Asymptote(d, end); }

}  // namespace bgmo::series
