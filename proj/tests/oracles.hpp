#pragma once
// Reference computations for the tests, built on Boost rather than on the
// library's own quadrature and root finders.

#include <cmath>
#include <functional>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "bgmo/baseline.hpp"

namespace oracle {

// ∫ exp(log_h(t)) dt over the support of b, taken as ∫ h/g du in the
// baseline probability scale so that heavy tails and endpoint spikes are
// handled by the double-exponential rule.
inline double integrate_log(const bgmo::Baseline& b, const std::function<double(double)>& log_h) {
  boost::math::quadrature::tanh_sinh<double> rule;
  auto lower = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double t = b.quantile(u);
    const double lh = log_h(t);
    return lh == -HUGE_VAL ? 0.0 : std::exp(lh - b.log_pdf(t));
  };
  auto upper = [&](double v) {
    if (v <= 0.0) return 0.0;
    const double t = b.quantile_sf(v);
    const double lh = log_h(t);
    return lh == -HUGE_VAL ? 0.0 : std::exp(lh - b.log_pdf(t));
  };
  return rule.integrate(lower, 0.0, 0.5) + rule.integrate(upper, 0.0, 0.5);
}

}  // namespace oracle
