#pragma once

#include <functional>

namespace bgmo::quad {

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 1e-12;
  int max_intervals = 4000;
};

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  int intervals = 0;
  bool converged = false;
};

// Globally adaptive 15-point Gauss-Kronrod on the finite interval [a, b].
// The integrand is never evaluated at the end points, so integrable end
// point singularities are fine. A non-finite sample throws DivergenceError.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opts = {});

}  // namespace bgmo::quad
