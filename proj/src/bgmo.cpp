#include "bgmo/bgmo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "bgmo/error.hpp"

namespace bgmo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// a * log_x with the convention 0 * (±∞) = 0, so unit exponents drop out
// exactly at the ends of the support.
double scaled_log(double a, double log_x) { return a == 0.0 ? 0.0 : a * log_x; }

}  // namespace

void BgmoParams::validate() const {
  for (double v : {m, n, theta, alpha}) {
    if (!(v > 0.0 && std::isfinite(v))) {
      throw DomainError("BGMO parameters m, n, theta, alpha must all be positive and finite");
    }
  }
}

BgmoDistribution::BgmoDistribution(BgmoParams params, Baseline baseline)
    : params_(params), baseline_(std::move(baseline)), log_beta_(0.0) {
  params_.validate();
  log_beta_ = specfun::log_beta(params_.m, params_.n);
}

BgmoLogTerms BgmoDistribution::log_terms(double t) const {
  const auto& p = params_;
  BgmoLogTerms out{};
  out.mo = mo_terms(p.alpha, baseline_, t);
  out.log_w = p.theta * out.mo.log_s;
  out.log_w_comp = out.log_w == 0.0 ? -kInf : std::log(-std::expm1(out.log_w));
  if (out.mo.log_g == -kInf) {
    out.log_pdf = -kInf;
    return out;
  }
  // f = θ h_G w^n (1 - w)^(m-1) / (B D), with h_G the baseline hazard.
  out.log_pdf = -log_beta_ + std::log(p.theta) + baseline_.log_hazard(t) - out.mo.log_D +
                p.n * out.log_w + scaled_log(p.m - 1.0, out.log_w_comp);
  if (std::isnan(out.log_pdf)) out.log_pdf = -kInf;
  return out;
}

double BgmoDistribution::log_pdf(double t) const { return log_terms(t).log_pdf; }

double BgmoDistribution::pdf(double t) const { return std::exp(log_pdf(t)); }

double BgmoDistribution::cdf(double t) const {
  const double log_w = params_.theta * mo_terms(params_.alpha, baseline_, t).log_s;
  const double w = std::exp(log_w);
  const double w_comp = -std::expm1(log_w);
  return specfun::reg_inc_beta_tails(w_comp, w, params_.m, params_.n).lower;
}

double BgmoDistribution::sf(double t) const {
  const double log_w = params_.theta * mo_terms(params_.alpha, baseline_, t).log_s;
  const double w = std::exp(log_w);
  const double w_comp = -std::expm1(log_w);
  return specfun::reg_inc_beta_tails(w_comp, w, params_.m, params_.n).upper;
}

Flagged BgmoDistribution::hrf(double t) const {
  const double s = sf(t);
  if (s == 0.0) return {kInf, true};
  return {pdf(t) / s, false};
}

Flagged BgmoDistribution::rhrf(double t) const {
  const double c = cdf(t);
  if (c == 0.0) return {kInf, true};
  return {pdf(t) / c, false};
}

double BgmoDistribution::chrf(double t) const { return -std::log(sf(t)); }

double BgmoDistribution::quantile(double u, const specfun::ToleranceConfig& tol) const {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile needs u in (0, 1)");
  const auto& p = params_;
  // w = s^θ is the upper beta root: I_{1-w}(m, n) = u.
  const specfun::BetaRoot root = specfun::beta_quantile_tails(u, 1.0 - u, p.m, p.n, tol);
  const double w = root.z_comp;
  if (w <= 0.0) return kInf;
  if (w >= 1.0) return baseline_.support_low();
  const double s = std::exp(std::log(w) / p.theta);
  const double s_comp = -std::expm1(std::log(w) / p.theta);
  // Invert s = αḠ/(G + αḠ) for G and Ḡ separately.
  const double denom = p.alpha * s_comp + s;
  const double G = p.alpha * s_comp / denom;
  const double G_bar = s / denom;
  if (G <= 0.0) return baseline_.support_low();
  if (G_bar <= 0.0) return kInf;
  return G <= 0.5 ? baseline_.quantile(G) : baseline_.quantile_sf(G_bar);
}

double unit_uniform(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

std::vector<double> BgmoDistribution::sample(std::size_t count, std::uint64_t seed) const {
  if (count == 0) throw DomainError("sample count must be at least 1");
  std::mt19937_64 engine(seed);
  std::vector<double> out(count);
  for (auto& x : out) x = quantile(unit_uniform(engine()));
  return out;
}

double bowley_from_quantiles(double q1, double q2, double q3) {
  const double spread = q3 - q1;
  if (!(std::fabs(spread) > 0.0) || !std::isfinite(spread)) {
    throw DomainError("Bowley skewness undefined: Q(3/4) equals Q(1/4)");
  }
  return (q3 + q1 - 2.0 * q2) / spread;
}

double moors_from_octiles(double e1, double e2, double e3, double e5, double e6, double e7) {
  const double spread = e6 - e2;
  if (!(std::fabs(spread) > 0.0) || !std::isfinite(spread)) {
    throw DomainError("Moors kurtosis undefined: Q(6/8) equals Q(2/8)");
  }
  return (e3 - e1 + e7 - e5) / spread;
}

double bowley_skewness(const BgmoDistribution& d) {
  return bowley_from_quantiles(d.quantile(0.25), d.quantile(0.5), d.quantile(0.75));
}

double moors_kurtosis(const BgmoDistribution& d) {
  return moors_from_octiles(d.quantile(1.0 / 8), d.quantile(2.0 / 8), d.quantile(3.0 / 8),
                            d.quantile(5.0 / 8), d.quantile(6.0 / 8), d.quantile(7.0 / 8));
}

namespace {

bool near(double a, double b) { return std::fabs(a - b) <= 1e-14 * std::max(1.0, std::fabs(b)); }

// Sub-model densities written straight from their textbook forms.
double bmo_pdf(double m, double n, double alpha, double g, double G, double Gb) {
  const double D = 1.0 - (1.0 - alpha) * Gb;
  const double B = std::exp(specfun::log_beta(m, n));
  return alpha * g / (D * D) * std::pow(G / D, m - 1.0) * std::pow(alpha * Gb / D, n - 1.0) / B;
}

double mo_pdf(double alpha, double g, double Gb) {
  const double D = 1.0 - (1.0 - alpha) * Gb;
  return alpha * g / (D * D);
}

double beta_g_pdf(double m, double n, double g, double G, double Gb) {
  const double B = std::exp(specfun::log_beta(m, n));
  return g * std::pow(G, m - 1.0) * std::pow(Gb, n - 1.0) / B;
}

}  // namespace

double reduction_check(const BgmoDistribution& d, ReductionTarget target) {
  const auto& p = d.params();
  switch (target) {
    case ReductionTarget::BMO:
      if (!near(p.theta, 1.0)) throw PreconditionError("BMO reduction needs theta = 1");
      break;
    case ReductionTarget::GMO:
      if (!near(p.m, 1.0) || !near(p.n, 1.0)) throw PreconditionError("GMO reduction needs m = n = 1");
      break;
    case ReductionTarget::MO:
      if (!near(p.m, 1.0) || !near(p.n, 1.0) || !near(p.theta, 1.0)) {
        throw PreconditionError("MO reduction needs m = n = theta = 1");
      }
      break;
    case ReductionTarget::BetaG:
      if (!near(p.alpha, 1.0) || !near(p.theta, 1.0)) {
        throw PreconditionError("Beta-G reduction needs alpha = theta = 1");
      }
      break;
  }
  const Baseline& b = d.baseline();
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double u = (i + 0.5) / 200.0;
    const double t = b.quantile(u);
    const double g = b.pdf(t);
    const double G = b.cdf(t);
    const double Gb = b.sf(t);
    double reference = 0.0;
    switch (target) {
      case ReductionTarget::BMO: reference = bmo_pdf(p.m, p.n, p.alpha, g, G, Gb); break;
      case ReductionTarget::GMO: reference = gmo_pdf({p.alpha, p.theta}, b, t); break;
      case ReductionTarget::MO: reference = mo_pdf(p.alpha, g, Gb); break;
      case ReductionTarget::BetaG: reference = beta_g_pdf(p.m, p.n, g, G, Gb); break;
    }
    worst = std::max(worst, std::fabs(d.pdf(t) - reference));
  }
  return worst;
}

}  // namespace bgmo
