#pragma once

#include <functional>
#include <vector>

namespace bgmo::opt {

struct NelderMeadOptions {
  int max_iter = 2000;
  double f_tol = 1e-9;   // relative spread of simplex values, scaled by 1 + |f|
  double x_tol = 1e-8;   // largest vertex distance from the best vertex
  double initial_step = 0.5;
  bool record_trace = false;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::vector<double> trace;  // best value after each iteration
};

// Minimizes `fn` with the classic simplex method
// (reflection 1, expansion 2, contraction 1/2, shrink 1/2). Non-finite
// values are treated as +∞.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& fn,
                             std::vector<double> x0, const NelderMeadOptions& opts = {});

}  // namespace bgmo::opt
