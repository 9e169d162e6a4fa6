#pragma once

#include <vector>

#include "bgmo/bgmo.hpp"

namespace bgmo::series {

// Closing rule for the formally infinite expansions: stop at max_terms or
// once |term| < tail_tol·|partial sum|.
struct TruncationPolicy {
  int max_terms = 60;
  double tail_tol = 1e-10;

  void validate() const;
};

// A truncated sum together with its last-term residual estimate.
// `converged` is false when max_terms ran out before tail_tol was met.
struct SeriesValue {
  double value = 0.0;
  double residual = 0.0;
  bool converged = true;
};

// Coefficients of the mixture representations. Index conventions:
//   delta[j], delta_prime[j]  f = f^MO Σ_j δ_j s^{θ(j+n)-1} with s = F̄^MO
//   phi[l]                    f = f^MO Σ_l φ_l x^l with x = F^MO
//   chi[k]                    F = Σ_k χ_k x^k           (integer m only)
//   psi[p-m][q][r]            F = Σ ψ_{p,q,r} x^r       (integer m, n only)
struct ExpansionCoeffs {
  std::vector<double> delta;
  std::vector<double> delta_prime;
  std::vector<double> phi;
  std::vector<double> chi;
  std::vector<std::vector<std::vector<double>>> psi;
  bool finite_delta = false;  // m is an integer: δ has exactly m entries
  bool finite_phi = false;    // every θ(j+n)-1 is a nonnegative integer
};

struct DeltaCoeffs {
  std::vector<double> delta;
  std::vector<double> delta_prime;
  bool finite = false;
};

DeltaCoeffs delta_coeffs(double m, double n, double theta, const TruncationPolicy& policy = {});

// All coefficient tables for d; chi is left empty for non-integer m and psi
// for non-integer m or n.
ExpansionCoeffs expansion_coeffs(const BgmoParams& p, const TruncationPolicy& policy = {});

enum class PdfForm { SurvivalPowers, CdfPowers };
enum class CdfForm { ChiSeries, PsiSeries };

SeriesValue pdf_via_expansion(const BgmoDistribution& d, double t, PdfForm form,
                              const TruncationPolicy& policy = {});

// ChiSeries needs integer m; PsiSeries needs integer m and n. Otherwise
// PreconditionError.
SeriesValue cdf_via_expansion(const BgmoDistribution& d, double t, CdfForm form,
                              const TruncationPolicy& policy = {});

// Order-statistic expansion tables for T_{r:N} (integer m):
//   d_table[e][k]  coefficient of x^k in (Σ_k χ_k x^k)^{r-1+e}, e = 0..N-r
//   xi[l][k]       f_{r:N} = f^MO Σ_l Σ_k ξ_{l,k} x^{k+l}
struct OrderStatCoeffs {
  std::vector<std::vector<double>> d_table;
  std::vector<std::vector<double>> xi;
};

OrderStatCoeffs order_stat_coeffs(const BgmoParams& p, int r, int sample_n,
                                  const TruncationPolicy& policy = {});

enum class OrderMethod { Direct, Series };

// Density of the r-th smallest of `sample_n` draws. Series needs integer m.
double order_stat_pdf(const BgmoDistribution& d, int r, int sample_n, double t, OrderMethod method,
                      const TruncationPolicy& policy = {});

// Γ_{p,q,r} = ∫ t^p (F^MO)^q (F̄^MO)^r f^MO dt for MO(α) on baseline b.
double pwm_mo(double alpha, const Baseline& b, int p, double q, double r);

// E[T^s] from the δ-weighted PWM sum, and by direct quadrature.
SeriesValue moment_series(const BgmoDistribution& d, int s, const TruncationPolicy& policy = {});
double moment_direct(const BgmoDistribution& d, int s);

// E[T^s_{r:N}] from the ξ-weighted PWM sum (integer m), and by quadrature
// of t^s times the direct order-statistic density.
SeriesValue order_stat_moment(const BgmoDistribution& d, int r, int sample_n, int s,
                              const TruncationPolicy& policy = {});
double order_stat_moment_direct(const BgmoDistribution& d, int r, int sample_n, int s);

// E[e^{sT}] by quadrature; throws DivergenceError past the abscissa of
// convergence.
double mgf(const BgmoDistribution& d, double s);
// Σ_j (-δ′_j) M_{X_j}(s) over exponentiated-MO components.
SeriesValue mgf_series(const BgmoDistribution& d, double s, const TruncationPolicy& policy = {});

SeriesValue renyi_entropy(const BgmoDistribution& d, double delta,
                          const TruncationPolicy& policy = {});
double renyi_entropy_direct(const BgmoDistribution& d, double delta);

enum class TailEnd { LowerTail, UpperTail };

// Leading-order tail forms of f, the tail probability (F at the lower end,
// 1 - F at the upper end) and the hazard rate.
class Asymptote {
 public:
  Asymptote(const BgmoDistribution& d, TailEnd end);

  TailEnd end() const { return end_; }
  double pdf(double t) const;
  double tail_probability(double t) const;
  double hazard(double t) const;

 private:
  BgmoParams p_;
  Baseline b_;
  TailEnd end_;
  double log_beta_;
};

Asymptote asymptote(const BgmoDistribution& d, TailEnd end);

}  // namespace bgmo::series
