#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bgmo/quadrature.hpp"

namespace bgmo {

enum class Family {
  Exponential,
  Weibull,
  Lomax,
  Frechet,
  Gompertz,
  ExtendedWeibull,
  ModifiedWeibull,
  ExponentiatedPareto,
};

// Z(t) of the extended Weibull family G = 1 - exp(-δ Z(t)).
enum class ZKind {
  Linear,        // Z = t
  Square,        // Z = t^2
  LogRatio,      // Z = ln(t / k), support t >= k
  GompertzLink,  // Z = (e^{βt} - 1) / β
};

// One of the eight baseline distributions G with validated parameters.
//
// Parameter order per family (names as accepted on the command line):
//   exponential       lambda
//   weibull           lambda beta          G = 1 - exp(-lambda t^beta)
//   lomax             beta delta           G = 1 - (1 + t/delta)^-beta
//   frechet           lambda delta         G = exp(-(delta/t)^lambda)
//   gompertz          beta lambda          G = 1 - exp(-(beta/lambda)(e^{lambda t} - 1))
//   extended_weibull  delta [k | beta]     G = 1 - exp(-delta Z(t))
//   modified_weibull  sigma beta gamma     G = 1 - exp(-sigma t - beta t^gamma)
//   exp_pareto        theta_p k gamma      G = (1 - (theta_p/t)^k)^gamma, t > theta_p
//
// Every evaluation is available in log space; cdf and sf are each computed
// directly so neither loses precision in its own tail.
class Baseline {
 public:
  static Baseline exponential(double lambda);
  static Baseline weibull(double lambda, double beta);
  static Baseline lomax(double beta, double delta);
  static Baseline frechet(double lambda, double delta);
  static Baseline gompertz(double beta, double lambda);
  static Baseline extended_weibull(double delta, ZKind z, double z_param = 1.0);
  static Baseline modified_weibull(double sigma, double beta, double gamma);
  static Baseline exp_pareto(double theta_p, double k, double gamma);

  // Same family and Z variant, new parameter vector (validated).
  Baseline with_params(std::span<const double> params) const;

  // Lowercase family tag plus name=value pairs; extended_weibull also takes
  // z=linear|square|logratio|gompertz.
  static Baseline from_spec(std::string_view family, const std::map<std::string, double>& params,
                            std::string_view z_kind = "linear");
  // The family with every parameter set to 1.
  static Baseline unit(std::string_view family, std::string_view z_kind = "linear");

  Family family() const { return family_; }
  ZKind z_kind() const { return z_kind_; }
  const std::vector<double>& params() const { return params_; }
  std::vector<std::string> param_names() const;
  std::string tag() const;
  double support_low() const;

  double log_pdf(double t) const;
  double log_cdf(double t) const;
  double log_sf(double t) const;
  double pdf(double t) const;
  double cdf(double t) const;
  double sf(double t) const;
  double hazard(double t) const;
  // log g(t)/Ḡ(t), free of the cancellation in log_pdf - log_sf far in the
  // upper tail.
  double log_hazard(double t) const;

  // Inverse of the cdf, u in (0, 1).
  double quantile(double u) const;
  // Inverse of the survival function, v in (0, 1); exact for tiny v.
  double quantile_sf(double v) const;

  // True for the families with coded parameter partials (Exponential, Weibull).
  bool has_partials() const;
  // Partials of log g(t) and log Ḡ(t) with respect to each parameter.
  void log_partials(double t, std::span<double> d_log_pdf, std::span<double> d_log_sf) const;

 private:
  Baseline(Family family, std::vector<double> params, ZKind z = ZKind::Linear);
  void validate() const;
  // Cumulative hazard -log Ḡ(t) inside the support.
  double cum_hazard(double t) const;
  double inverse_cum_hazard(double h) const;

  Family family_;
  ZKind z_kind_;
  std::vector<double> params_;
};

// ∫ h(t) dt over the support of `b`, where `fn(t, log_g)` returns h(t)/g(t).
// The integral is taken in probability scale: u = G(t) below the baseline
// median and v = Ḡ(t) above it, so unbounded supports and heavy tails need
// no truncation.
quad::Result integrate_over_support(const Baseline& b,
                                    const std::function<double(double t, double log_g)>& fn,
                                    const quad::Options& opts = {});

// Sanity check for integrals that may diverge in the upper tail: samples
// v·fn at v = 1e-100, 1e-200, 1e-300 and throws DivergenceError naming
// `what` when the tail mass does not shrink.
void check_upper_tail(const Baseline& b, const std::function<double(double t, double log_g)>& fn,
                      const std::string& what);

}  // namespace bgmo
