#include "bgmo/gmo.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "bgmo/error.hpp"

namespace bgmo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double logaddexp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

void GmoParams::validate() const {
  if (!(alpha > 0.0 && std::isfinite(alpha)) || !(theta > 0.0 && std::isfinite(theta))) {
    throw DomainError("GMO parameters alpha and theta must be positive and finite");
  }
}

MoTerms mo_terms(double alpha, const Baseline& b, double t) {
  MoTerms m{};
  m.log_g = b.log_pdf(t);
  m.log_G = b.log_cdf(t);
  m.log_Gbar = b.log_sf(t);
  const double log_alpha = std::log(alpha);
  m.log_D = logaddexp(m.log_G, log_alpha + m.log_Gbar);
  m.log_s_comp = m.log_G - m.log_D;
  // Near the lower end s is within rounding of 1; derive it from 1 - s then.
  m.log_s = m.log_s_comp < -std::numbers::ln2 ? std::log1p(-std::exp(m.log_s_comp))
                                               : log_alpha + m.log_Gbar - m.log_D;
  m.log_f_mo = log_alpha + m.log_g - 2.0 * m.log_D;
  return m;
}

double gmo_sf(const GmoParams& p, const Baseline& b, double t) {
  p.validate();
  return std::exp(p.theta * mo_terms(p.alpha, b, t).log_s);
}

double gmo_cdf(const GmoParams& p, const Baseline& b, double t) {
  p.validate();
  return -std::expm1(p.theta * mo_terms(p.alpha, b, t).log_s);
}

double gmo_pdf(const GmoParams& p, const Baseline& b, double t) {
  p.validate();
  const MoTerms m = mo_terms(p.alpha, b, t);
  if (m.log_g == -kInf) return 0.0;
  const double theta = p.theta;
  const double lg_bar = theta == 1.0 ? 0.0 : (theta - 1.0) * m.log_Gbar;
  return std::exp(std::log(theta) + theta * std::log(p.alpha) + m.log_g + lg_bar -
                  (theta + 1.0) * m.log_D);
}

double gmo_hrf(const GmoParams& p, const Baseline& b, double t) {
  p.validate();
  const MoTerms m = mo_terms(p.alpha, b, t);
  if (m.log_Gbar == -kInf) return kInf;
  if (m.log_g == -kInf) return 0.0;
  // f/F̄ = θ h / D with h the baseline hazard
  return std::exp(std::log(p.theta) + b.log_hazard(t) - m.log_D);
}

double gmo_rhrf(const GmoParams& p, const Baseline& b, double t) {
  const double cdf = gmo_cdf(p, b, t);
  const double pdf = gmo_pdf(p, b, t);
  if (cdf == 0.0) return pdf == 0.0 ? 0.0 : kInf;
  return pdf / cdf;
}

double gmo_chrf(const GmoParams& p, const Baseline& b, double t) {
  p.validate();
  return -p.theta * mo_terms(p.alpha, b, t).log_s;
}

}  // namespace bgmo
