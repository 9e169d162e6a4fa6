#pragma once

#include "bgmo/baseline.hpp"

namespace bgmo {

// Marshall-Olkin tilt α and Lehmann-II exponent θ.
struct GmoParams {
  double alpha = 1.0;
  double theta = 1.0;

  void validate() const;
};

// Log-space building blocks of the Marshall-Olkin transform at one point t.
// With D = G + αḠ = 1 - ᾱḠ the MO survival is s = αḠ/D and its complement
// is 1 - s = G/D, so both logs are exact without cancellation.
struct MoTerms {
  double log_g;        // log g(t)
  double log_G;        // log G(t)
  double log_Gbar;     // log Ḡ(t)
  double log_D;        // log(1 - ᾱḠ(t))
  double log_s;        // log F̄^MO(t)
  double log_s_comp;   // log F^MO(t)
  double log_f_mo;     // log f^MO(t) = log(αg/D²)
};

MoTerms mo_terms(double alpha, const Baseline& b, double t);

double gmo_sf(const GmoParams& p, const Baseline& b, double t);
double gmo_cdf(const GmoParams& p, const Baseline& b, double t);
double gmo_pdf(const GmoParams& p, const Baseline& b, double t);
// +∞ when the survival function has underflowed to 0.
double gmo_hrf(const GmoParams& p, const Baseline& b, double t);
double gmo_rhrf(const GmoParams& p, const Baseline& b, double t);
double gmo_chrf(const GmoParams& p, const Baseline& b, double t);

}  // namespace bgmo
