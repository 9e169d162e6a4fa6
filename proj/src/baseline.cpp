#include "bgmo/baseline.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bgmo/error.hpp"

namespace bgmo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(1 - e^x) for x <= 0.
double log1mexp(double x) {
  if (x == 0.0) return -kInf;
  return x > -0.693147180559945 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

bool positive(double v) { return v > 0.0 && std::isfinite(v); }

std::vector<double> take(const std::map<std::string, double>& params,
                         const std::vector<std::string>& names, std::string_view family) {
  std::vector<double> out;
  for (const auto& name : names) {
    auto it = params.find(name);
    if (it == params.end()) {
      throw DomainError("baseline '" + std::string(family) + "' needs parameter '" + name + "'");
    }
    out.push_back(it->second);
  }
  for (const auto& [name, value] : params) {
    bool known = false;
    for (const auto& n : names) known = known || n == name;
    if (!known) {
      throw DomainError("baseline '" + std::string(family) + "' has no parameter '" + name + "'");
    }
  }
  return out;
}

}  // namespace

Baseline::Baseline(Family family, std::vector<double> params, ZKind z)
    : family_(family), z_kind_(z), params_(std::move(params)) {
  validate();
}

Baseline Baseline::exponential(double lambda) { return {Family::Exponential, {lambda}}; }
Baseline Baseline::weibull(double lambda, double beta) { return {Family::Weibull, {lambda, beta}}; }
Baseline Baseline::lomax(double beta, double delta) { return {Family::Lomax, {beta, delta}}; }
Baseline Baseline::frechet(double lambda, double delta) { return {Family::Frechet, {lambda, delta}}; }
Baseline Baseline::gompertz(double beta, double lambda) { return {Family::Gompertz, {beta, lambda}}; }

Baseline Baseline::extended_weibull(double delta, ZKind z, double z_param) {
  if (z == ZKind::Linear || z == ZKind::Square) return {Family::ExtendedWeibull, {delta}, z};
  return {Family::ExtendedWeibull, {delta, z_param}, z};
}

Baseline Baseline::modified_weibull(double sigma, double beta, double gamma) {
  return {Family::ModifiedWeibull, {sigma, beta, gamma}};
}

Baseline Baseline::exp_pareto(double theta_p, double k, double gamma) {
  return {Family::ExponentiatedPareto, {theta_p, k, gamma}};
}

Baseline Baseline::with_params(std::span<const double> params) const {
  if (params.size() != params_.size()) {
    throw DomainError("baseline '" + tag() + "' expects " + std::to_string(params_.size()) +
                      " parameters");
  }
  return {family_, std::vector<double>(params.begin(), params.end()), z_kind_};
}

Baseline Baseline::from_spec(std::string_view family, const std::map<std::string, double>& params,
                             std::string_view z_kind) {
  if (family == "exponential") {
    auto p = take(params, {"lambda"}, family);
    return exponential(p[0]);
  }
  if (family == "weibull") {
    auto p = take(params, {"lambda", "beta"}, family);
    return weibull(p[0], p[1]);
  }
  if (family == "lomax") {
    auto p = take(params, {"beta", "delta"}, family);
    return lomax(p[0], p[1]);
  }
  if (family == "frechet") {
    auto p = take(params, {"lambda", "delta"}, family);
    return frechet(p[0], p[1]);
  }
  if (family == "gompertz") {
    auto p = take(params, {"beta", "lambda"}, family);
    return gompertz(p[0], p[1]);
  }
  if (family == "extended_weibull") {
    if (z_kind == "linear") return extended_weibull(take(params, {"delta"}, family)[0], ZKind::Linear);
    if (z_kind == "square") return extended_weibull(take(params, {"delta"}, family)[0], ZKind::Square);
    if (z_kind == "logratio") {
      auto p = take(params, {"delta", "k"}, family);
      return extended_weibull(p[0], ZKind::LogRatio, p[1]);
    }
    if (z_kind == "gompertz") {
      auto p = take(params, {"delta", "beta"}, family);
      return extended_weibull(p[0], ZKind::GompertzLink, p[1]);
    }
    throw DomainError("unknown extended_weibull Z variant '" + std::string(z_kind) + "'");
  }
  if (family == "modified_weibull") {
    auto p = take(params, {"sigma", "beta", "gamma"}, family);
    return modified_weibull(p[0], p[1], p[2]);
  }
  if (family == "exp_pareto") {
    auto p = take(params, {"theta_p", "k", "gamma"}, family);
    return exp_pareto(p[0], p[1], p[2]);
  }
  throw DomainError("unknown baseline family '" + std::string(family) + "'");
}

Baseline Baseline::unit(std::string_view family, std::string_view z_kind) {
  static const std::map<std::string, std::vector<std::string>, std::less<>> names = {
      {"exponential", {"lambda"}},
      {"weibull", {"lambda", "beta"}},
      {"lomax", {"beta", "delta"}},
      {"frechet", {"lambda", "delta"}},
      {"gompertz", {"beta", "lambda"}},
      {"modified_weibull", {"sigma", "beta", "gamma"}},
      {"exp_pareto", {"theta_p", "k", "gamma"}},
  };
  std::map<std::string, double> ones;
  if (family == "extended_weibull") {
    ones["delta"] = 1.0;
    if (z_kind == "logratio") ones["k"] = 1.0;
    if (z_kind == "gompertz") ones["beta"] = 1.0;
  } else if (auto it = names.find(family); it != names.end()) {
    for (const auto& n : it->second) ones[n] = 1.0;
  }
  return from_spec(family, ones, z_kind);
}

std::vector<std::string> Baseline::param_names() const {
  switch (family_) {
    case Family::Exponential: return {"lambda"};
    case Family::Weibull: return {"lambda", "beta"};
    case Family::Lomax: return {"beta", "delta"};
    case Family::Frechet: return {"lambda", "delta"};
    case Family::Gompertz: return {"beta", "lambda"};
    case Family::ExtendedWeibull:
      if (z_kind_ == ZKind::LogRatio) return {"delta", "k"};
      if (z_kind_ == ZKind::GompertzLink) return {"delta", "beta"};
      return {"delta"};
    case Family::ModifiedWeibull: return {"sigma", "beta", "gamma"};
    case Family::ExponentiatedPareto: return {"theta_p", "k", "gamma"};
  }
  return {};
}

std::string Baseline::tag() const {
  switch (family_) {
    case Family::Exponential: return "exponential";
    case Family::Weibull: return "weibull";
    case Family::Lomax: return "lomax";
    case Family::Frechet: return "frechet";
    case Family::Gompertz: return "gompertz";
    case Family::ExtendedWeibull: return "extended_weibull";
    case Family::ModifiedWeibull: return "modified_weibull";
    case Family::ExponentiatedPareto: return "exp_pareto";
  }
  return "unknown";
}

void Baseline::validate() const {
  const auto& p = params_;
  bool ok = true;
  switch (family_) {
    case Family::ModifiedWeibull:
      ok = positive(p[2]) && p[0] >= 0.0 && p[1] >= 0.0 && std::isfinite(p[0]) &&
           std::isfinite(p[1]) && p[0] + p[1] > 0.0;
      break;
    default:
      for (double v : p) ok = ok && positive(v);
      break;
  }
  if (!ok) {
    std::ostringstream msg;
    msg << "invalid parameters for baseline '" << tag() << "':";
    for (double v : p) msg << ' ' << v;
    throw DomainError(msg.str());
  }
}

double Baseline::support_low() const {
  if (family_ == Family::ExponentiatedPareto) return params_[0];
  if (family_ == Family::ExtendedWeibull && z_kind_ == ZKind::LogRatio) return params_[1];
  return 0.0;
}

double Baseline::cum_hazard(double t) const {
  const auto& p = params_;
  switch (family_) {
    case Family::Exponential: return p[0] * t;
    case Family::Weibull: return p[0] * std::pow(t, p[1]);
    case Family::Lomax: return p[0] * std::log1p(t / p[1]);
    case Family::Gompertz: return p[0] / p[1] * std::expm1(p[1] * t);
    case Family::ExtendedWeibull:
      switch (z_kind_) {
        case ZKind::Linear: return p[0] * t;
        case ZKind::Square: return p[0] * t * t;
        case ZKind::LogRatio: return p[0] * std::log(t / p[1]);
        case ZKind::GompertzLink: return p[0] * std::expm1(p[1] * t) / p[1];
      }
      break;
    case Family::ModifiedWeibull: return p[0] * t + p[1] * std::pow(t, p[2]);
    case Family::Frechet:
    case Family::ExponentiatedPareto: return -log_sf(t);
  }
  return 0.0;
}

double Baseline::inverse_cum_hazard(double h) const {
  const auto& p = params_;
  switch (family_) {
    case Family::Exponential: return h / p[0];
    case Family::Weibull: return std::pow(h / p[0], 1.0 / p[1]);
    case Family::Lomax: return p[1] * std::expm1(h / p[0]);
    case Family::Gompertz: return std::log1p(p[1] / p[0] * h) / p[1];
    case Family::ExtendedWeibull:
      switch (z_kind_) {
        case ZKind::Linear: return h / p[0];
        case ZKind::Square: return std::sqrt(h / p[0]);
        case ZKind::LogRatio: return p[1] * std::exp(h / p[0]);
        case ZKind::GompertzLink: return std::log1p(p[1] * h / p[0]) / p[1];
      }
      break;
    case Family::ModifiedWeibull: {
      // σt + βt^γ has no closed-form inverse: grow a bracket geometrically,
      // then bisect to full precision.
      if (h <= 0.0) return 0.0;
      if (!std::isfinite(h)) return kInf;
      double hi = 1.0;
      while (cum_hazard(hi) < h) hi *= 2.0;
      while (hi > 1e-300 && cum_hazard(0.5 * hi) >= h) hi *= 0.5;
      double lo = 0.5 * hi;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        if (cum_hazard(mid) < h) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    case Family::Frechet:
    case Family::ExponentiatedPareto: return quantile_sf(std::exp(-h));
  }
  return 0.0;
}

double Baseline::log_pdf(double t) const {
  if (std::isnan(t)) throw DomainError("baseline evaluated at NaN");
  if (t < support_low() || t == kInf) return -kInf;
  const auto& p = params_;
  switch (family_) {
    case Family::Frechet: {
      if (t <= 0.0) return -kInf;
      const double lr = std::log(p[1] / t);
      return std::log(p[0]) + p[0] * std::log(p[1]) - (p[0] + 1.0) * std::log(t) -
             std::exp(p[0] * lr);
    }
    case Family::ExponentiatedPareto: {
      if (t <= p[0]) return -kInf;
      const double x = std::pow(p[0] / t, p[1]);
      return std::log(p[2] * p[1]) + p[1] * std::log(p[0]) - (p[1] + 1.0) * std::log(t) +
             (p[2] - 1.0) * std::log1p(-x);
    }
    case Family::Lomax:
      return std::log(p[0] / p[1]) - (p[0] + 1.0) * std::log1p(t / p[1]);
    default: return log_hazard(t) - cum_hazard(t);
  }
}

double Baseline::log_hazard(double t) const {
  if (std::isnan(t)) throw DomainError("baseline evaluated at NaN");
  if (t < support_low() || t == kInf) return -kInf;
  const auto& p = params_;
  switch (family_) {
    case Family::Exponential: return std::log(p[0]);
    case Family::Weibull:
      return std::log(p[0] * p[1]) + (p[1] == 1.0 ? 0.0 : (p[1] - 1.0) * std::log(t));
    case Family::Lomax: return std::log(p[0] / p[1]) - std::log1p(t / p[1]);
    case Family::Gompertz: return std::log(p[0]) + p[1] * t;
    case Family::ExtendedWeibull: {
      double log_z = 0.0;
      switch (z_kind_) {
        case ZKind::Linear: log_z = 0.0; break;
        case ZKind::Square: log_z = std::log(2.0 * t); break;
        case ZKind::LogRatio: log_z = -std::log(t); break;
        case ZKind::GompertzLink: log_z = p[1] * t; break;
      }
      return std::log(p[0]) + log_z;
    }
    case Family::ModifiedWeibull: return std::log(p[0] + p[1] * p[2] * std::pow(t, p[2] - 1.0));
    case Family::Frechet:
    case Family::ExponentiatedPareto: {
      const double lg = log_pdf(t);
      return lg == -kInf ? -kInf : lg - log_sf(t);
    }
  }
  return -kInf;
}

double Baseline::log_cdf(double t) const {
  if (std::isnan(t)) throw DomainError("baseline evaluated at NaN");
  if (t <= support_low()) return -kInf;
  if (t == kInf) return 0.0;
  const auto& p = params_;
  switch (family_) {
    case Family::Frechet: return -std::pow(p[1] / t, p[0]);
    case Family::ExponentiatedPareto: return p[2] * std::log1p(-std::pow(p[0] / t, p[1]));
    default: return log1mexp(-cum_hazard(t));
  }
}

double Baseline::log_sf(double t) const {
  if (std::isnan(t)) throw DomainError("baseline evaluated at NaN");
  if (t <= support_low()) return 0.0;
  if (t == kInf) return -kInf;
  switch (family_) {
    case Family::Frechet:
    case Family::ExponentiatedPareto: return log1mexp(log_cdf(t));
    default: return -cum_hazard(t);
  }
}

double Baseline::pdf(double t) const { return std::exp(log_pdf(t)); }
double Baseline::cdf(double t) const { return std::exp(log_cdf(t)); }
double Baseline::sf(double t) const { return std::exp(log_sf(t)); }
double Baseline::hazard(double t) const { return std::exp(log_hazard(t)); }

double Baseline::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("baseline quantile needs u in (0, 1)");
  const auto& p = params_;
  switch (family_) {
    case Family::Frechet: return p[1] * std::pow(-std::log(u), -1.0 / p[0]);
    case Family::ExponentiatedPareto: {
      const double x = -std::expm1(std::log(u) / p[2]);
      return p[0] * std::pow(x, -1.0 / p[1]);
    }
    default: return inverse_cum_hazard(-std::log1p(-u));
  }
}

double Baseline::quantile_sf(double v) const {
  if (!(v > 0.0 && v < 1.0)) throw DomainError("baseline survival quantile needs v in (0, 1)");
  const auto& p = params_;
  switch (family_) {
    case Family::Frechet: return p[1] * std::pow(-std::log1p(-v), -1.0 / p[0]);
    case Family::ExponentiatedPareto: {
      const double x = -std::expm1(std::log1p(-v) / p[2]);
      return p[0] * std::pow(x, -1.0 / p[1]);
    }
    default: return inverse_cum_hazard(-std::log(v));
  }
}

bool Baseline::has_partials() const {
  return family_ == Family::Exponential || family_ == Family::Weibull;
}

void Baseline::log_partials(double t, std::span<double> d_log_pdf,
                            std::span<double> d_log_sf) const {
  if (!has_partials()) {
    throw PreconditionError("no analytic partials for baseline '" + tag() + "'");
  }
  const auto& p = params_;
  if (family_ == Family::Exponential) {
    d_log_pdf[0] = 1.0 / p[0] - t;
    d_log_sf[0] = -t;
    return;
  }
  // Weibull: log g = ln λ + ln β + (β-1) ln t - λ t^β, log Ḡ = -λ t^β.
  const double lt = std::log(t);
  const double tb = std::exp(p[1] * lt);
  d_log_pdf[0] = 1.0 / p[0] - tb;
  d_log_sf[0] = -tb;
  d_log_pdf[1] = 1.0 / p[1] + lt - p[0] * tb * lt;
  d_log_sf[1] = -p[0] * tb * lt;
}

namespace {

double guarded(const Baseline& b, const std::function<double(double, double)>& fn, double t) {
  if (!std::isfinite(t)) return 0.0;
  const double lg = b.log_pdf(t);
  if (!std::isfinite(lg)) return 0.0;
  return fn(t, lg);
}

}  // namespace

quad::Result integrate_over_support(const Baseline& b,
                                    const std::function<double(double, double)>& fn,
                                    const quad::Options& opts) {
  quad::Options half = opts;
  half.abs_tol = 0.5 * opts.abs_tol;
  const quad::Result lower =
      quad::integrate([&](double u) { return guarded(b, fn, b.quantile(u)); }, 0.0, 0.5, half);
  const quad::Result upper =
      quad::integrate([&](double v) { return guarded(b, fn, b.quantile_sf(v)); }, 0.0, 0.5, half);
  quad::Result out;
  out.value = lower.value + upper.value;
  out.abs_error = lower.abs_error + upper.abs_error;
  out.intervals = lower.intervals + upper.intervals;
  out.converged = lower.converged && upper.converged;
  return out;
}

void check_upper_tail(const Baseline& b, const std::function<double(double, double)>& fn,
                      const std::string& what) {
  std::vector<double> mass;
  for (int k = 1; k <= 15; ++k) {
    const double v = std::pow(10.0, -20.0 * k);
    const double t = b.quantile_sf(v);
    if (!std::isfinite(t) || !std::isfinite(b.log_pdf(t))) break;
    const double a = std::fabs(v * fn(t, b.log_pdf(t)));
    if (!std::isfinite(a)) throw DivergenceError(what + ": integrand is unbounded in the upper tail");
    mass.push_back(a);
  }
  if (mass.size() < 3) return;
  const double last = mass[mass.size() - 1];
  const double prev = mass[mass.size() - 2];
  if (last > 1e-14 && last > 0.5 * prev) {
    throw DivergenceError(what + ": upper-tail mass does not vanish (integral diverges)");
  }
}

}  // namespace bgmo
