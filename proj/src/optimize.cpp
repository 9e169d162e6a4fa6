#include "bgmo/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace bgmo::opt {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& fn,
                             std::vector<double> x0, const NelderMeadOptions& opts) {
  const std::size_t dim = x0.size();
  NelderMeadResult out;
  auto eval = [&](const std::vector<double>& x) {
    ++out.evaluations;
    const double v = fn(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> simplex(dim + 1, x0);
  for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += opts.initial_step;
  std::vector<double> values(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(dim + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::vector<double>> s(dim + 1);
    std::vector<double> v(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) {
      s[i] = simplex[order[i]];
      v[i] = values[order[i]];
    }
    simplex.swap(s);
    values.swap(v);
  };
  auto point = [&](const std::vector<double>& centroid, double coef) {
    std::vector<double> p(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      p[k] = centroid[k] + coef * (simplex[dim][k] - centroid[k]);
    }
    return p;
  };

  sort_simplex();
  while (out.iterations < opts.max_iter) {
    const double spread = values[dim] - values[0];
    double size = 0.0;
    for (std::size_t i = 1; i <= dim; ++i) {
      for (std::size_t k = 0; k < dim; ++k) {
        size = std::max(size, std::fabs(simplex[i][k] - simplex[0][k]));
      }
    }
    if (std::isfinite(values[0]) && spread <= opts.f_tol * (1.0 + std::fabs(values[0])) &&
        size <= opts.x_tol) {
      out.converged = true;
      break;
    }
    ++out.iterations;

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[i][k] / static_cast<double>(dim);
    }
    const std::vector<double> reflected = point(centroid, -1.0);
    const double f_reflected = eval(reflected);
    if (f_reflected < values[0]) {
      const std::vector<double> expanded = point(centroid, -2.0);
      const double f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        simplex[dim] = expanded;
        values[dim] = f_expanded;
      } else {
        simplex[dim] = reflected;
        values[dim] = f_reflected;
      }
    } else if (f_reflected < values[dim - 1]) {
      simplex[dim] = reflected;
      values[dim] = f_reflected;
    } else {
      const bool outside = f_reflected < values[dim];
      const std::vector<double> contracted = point(centroid, outside ? -0.5 : 0.5);
      const double f_contracted = eval(contracted);
      if (f_contracted < (outside ? f_reflected : values[dim])) {
        simplex[dim] = contracted;
        values[dim] = f_contracted;
      } else {
        for (std::size_t i = 1; i <= dim; ++i) {
          for (std::size_t k = 0; k < dim; ++k) {
            simplex[i][k] = simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k]);
          }
          values[i] = eval(simplex[i]);
        }
      }
    }
    sort_simplex();
    if (opts.record_trace) out.trace.push_back(values[0]);
  }
  out.x = simplex[0];
  out.f = values[0];
  return out;
}

}  // namespace bgmo::opt
