#include "bgmo/quadrature.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "bgmo/error.hpp"

namespace bgmo::quad {

namespace {

// Kronrod abscissae (positive half, descending) and weights; every second
// abscissa starting at index 1 is a 7-point Gauss node.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment kronrod(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  auto sample = [&](double x) {
    const double v = f(x);
    if (!std::isfinite(v)) throw DivergenceError("integrand is not finite inside the interval");
    return v;
  };
  const double fc = sample(center);
  double kronrod_sum = fc * kWgk[7];
  double gauss_sum = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = sample(center - dx);
    const double f2 = sample(center + dx);
    kronrod_sum += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss_sum += kWg[j / 2] * (f1 + f2);
  }
  const double value = kronrod_sum * half;
  const double error = std::fabs((kronrod_sum - gauss_sum) * half);
  return {a, b, value, error};
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b, const Options& opts) {
  Result out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Segment> work;
  Segment first = kronrod(f, a, b);
  double total = first.value;
  double total_error = first.error;
  work.push(first);
  int intervals = 1;
  while (total_error > std::max(opts.abs_tol, opts.rel_tol * std::fabs(total))) {
    if (intervals >= opts.max_intervals) break;
    Segment worst = work.top();
    const double mid = 0.5 * (worst.a + worst.b);
    // Interval can no longer be split in floating point.
    if (!(mid > worst.a && mid < worst.b)) break;
    work.pop();
    const Segment left = kronrod(f, worst.a, mid);
    const Segment right = kronrod(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    work.push(left);
    work.push(right);
    ++intervals;
  }
  // Re-sum to shed the drift of the running updates.
  total = 0.0;
  total_error = 0.0;
  while (!work.empty()) {
    total += work.top().value;
    total_error += work.top().error;
    work.pop();
  }
  out.value = total;
  out.abs_error = total_error;
  out.intervals = intervals;
  out.converged = total_error <= std::max(opts.abs_tol, opts.rel_tol * std::fabs(total));
  return out;
}

}  // namespace bgmo::quad
