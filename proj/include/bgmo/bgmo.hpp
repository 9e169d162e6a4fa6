#pragma once

#include <cstdint>
#include <vector>

#include "bgmo/baseline.hpp"
#include "bgmo/gmo.hpp"
#include "bgmo/specfun.hpp"

namespace bgmo {

struct BgmoParams {
  double m = 1.0;
  double n = 1.0;
  double theta = 1.0;
  double alpha = 1.0;

  void validate() const;
};

// A hazard-type value together with a flag set when it was obtained by
// dividing by a vanishing probability (the value is then ±∞).
struct Flagged {
  double value;
  bool sentinel;
};

// Per-point log-space intermediates of the density, shared with the
// likelihood and score code.
struct BgmoLogTerms {
  MoTerms mo;
  double log_w;       // log s^θ
  double log_w_comp;  // log(1 - s^θ)
  double log_pdf;
};

class BgmoDistribution {
 public:
  BgmoDistribution(BgmoParams params, Baseline baseline);

  const BgmoParams& params() const { return params_; }
  const Baseline& baseline() const { return baseline_; }
  double log_beta_mn() const { return log_beta_; }

  BgmoLogTerms log_terms(double t) const;
  double log_pdf(double t) const;
  double pdf(double t) const;
  double cdf(double t) const;
  double sf(double t) const;
  Flagged hrf(double t) const;
  Flagged rhrf(double t) const;
  double chrf(double t) const;

  double quantile(double u, const specfun::ToleranceConfig& tol = {}) const;
  std::vector<double> sample(std::size_t count, std::uint64_t seed) const;

 private:
  BgmoParams params_;
  Baseline baseline_;
  double log_beta_;
};

// Uniform (0, 1) variate from one 64-bit draw, never exactly 0 or 1.
double unit_uniform(std::uint64_t bits);

// Quartile and octile shape measures. Both throw DomainError when the
// denominator vanishes.
double bowley_from_quantiles(double q1, double q2, double q3);
double moors_from_octiles(double e1, double e2, double e3, double e5, double e6, double e7);
double bowley_skewness(const BgmoDistribution& d);
double moors_kurtosis(const BgmoDistribution& d);

enum class ReductionTarget { BMO, GMO, MO, BetaG };

// Largest absolute pdf gap between `d` and the independently coded
// sub-model on a 200-point grid of baseline quantiles. Throws
// PreconditionError when d's parameters are not on the sub-model.
double reduction_check(const BgmoDistribution& d, ReductionTarget target);

}  // namespace bgmo
