#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "bgmo/bgmo.hpp"
#include "bgmo/error.hpp"
#include "oracles.hpp"

using namespace bgmo;

namespace {

double ks_distance(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, std::fabs((i + 1) / n - f), std::fabs(f - i / n)});
  }
  return d;
}

// GMO variate by inverting 1 - s^θ and s = αḠ/(1 - ᾱḠ) by hand.
double gmo_variate(double alpha, double theta, const Baseline& b, double u) {
  const double s = std::pow(1.0 - u, 1.0 / theta);
  const double gbar = s / (alpha + (1.0 - alpha) * s);
  return b.quantile_sf(gbar);
}

const Baseline kE1 = Baseline::exponential(1.0);

}  // namespace

TEST_CASE("pdf examples") {
  for (const Baseline& b : {kE1, Baseline::weibull(2.0, 0.7), Baseline::lomax(1.0, 3.0)}) {
    const BgmoDistribution d({1, 1, 1, 1}, b);
    for (double u : {0.1, 0.5, 0.9}) {
      const double t = b.quantile(u);
      CHECK(d.pdf(t) == doctest::Approx(b.pdf(t)).epsilon(1e-13));
    }
  }
  const BgmoDistribution d2({2, 1, 1, 1}, kE1);
  const double e = std::exp(-1.0);
  CHECK(d2.pdf(1.0) == doctest::Approx(2.0 * e * (1.0 - e)).epsilon(1e-13));
  CHECK(d2.pdf(1.0) == doctest::Approx(0.46508).epsilon(1e-5));

  const BgmoDistribution d3({2.5, 1.3, 0.7, 1.5}, Baseline::weibull(1.0, 2.0));
  const double t = 0.8, h = 1e-4;
  const double numeric = (8.0 * (d3.cdf(t + h) - d3.cdf(t - h)) - (d3.cdf(t + 2 * h) - d3.cdf(t - 2 * h))) / (12 * h);
  CHECK(numeric == doctest::Approx(d3.pdf(t)).epsilon(1e-6));
  CHECK(d3.pdf(-1.0) == 0.0);
}

TEST_CASE("cdf examples") {
  const BgmoDistribution d({2.5, 1.3, 0.7, 1.5}, Baseline::weibull(1.0, 2.0));
  CHECK(d.cdf(0.0) == 0.0);
  CHECK(d.cdf(HUGE_VAL) == 1.0);
  CHECK(d.cdf(1e3) == doctest::Approx(1.0));
  const BgmoDistribution g({1, 1, 0.6, 2.2}, kE1);
  for (double t : {0.1, 1.0, 3.0}) {
    CHECK(g.cdf(t) == doctest::Approx(gmo_cdf({2.2, 0.6}, kE1, t)).epsilon(1e-14));
  }
  CHECK(BgmoDistribution({1, 1, 1, 2}, kE1).cdf(std::log(2.0)) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("reliability identities") {
  const BgmoDistribution d({1.8, 0.6, 2.2, 0.4}, Baseline::frechet(1.5, 1.0));
  double prev = 0.0;
  for (int i = 1; i < 50; ++i) {
    const double t = d.quantile(i / 50.0);
    const double f = d.pdf(t);
    CHECK(std::fabs(d.hrf(t).value * d.sf(t) - f) <= 1e-12 * std::max(1.0, f));
    CHECK(std::fabs(d.rhrf(t).value * d.cdf(t) - f) <= 1e-12 * std::max(1.0, f));
    CHECK(d.cdf(t) + d.sf(t) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d.chrf(t) >= prev);
    prev = d.chrf(t);
  }
  const BgmoDistribution g({1, 1, 1.7, 0.3}, kE1);
  for (double t : {0.2, 1.0, 4.0}) {
    CHECK(g.hrf(t).value == doctest::Approx(1.7 * kE1.hazard(t) / (1.0 - 0.7 * kE1.sf(t))).epsilon(1e-12));
  }
  const Flagged at_zero = d.rhrf(0.0);
  CHECK(at_zero.sentinel);
  CHECK(std::isinf(at_zero.value));
  CHECK(d.hrf(HUGE_VAL).sentinel);
  CHECK_FALSE(d.hrf(1.0).sentinel);
}

TEST_CASE("quantile") {
  CHECK(BgmoDistribution({1, 1, 1, 1}, kE1).quantile(0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  const Baseline w = Baseline::weibull(1.3, 0.8);
  const double alpha = 0.4, theta = 2.5;
  const BgmoDistribution g({1, 1, theta, alpha}, w);
  for (double u : {0.05, 0.5, 0.95}) {
    const double x = 1.0 - std::pow(1.0 - u, 1.0 / theta);
    CHECK(g.quantile(u) == doctest::Approx(w.quantile(alpha * x / (1.0 - (1.0 - alpha) * x))).epsilon(1e-10));
  }
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> range(-1.5, 1.5);
  for (int draw = 0; draw < 5; ++draw) {
    const BgmoParams p{std::exp(range(rng)), std::exp(range(rng)), std::exp(range(rng)), std::exp(range(rng))};
    const BgmoDistribution d(p, Baseline::lomax(std::exp(range(rng)), 1.0));
    for (int i = 1; i <= 99; ++i) CHECK(std::fabs(d.cdf(d.quantile(i / 100.0)) - i / 100.0) <= 1e-8);
  }
  CHECK_THROWS_AS(g.quantile(0.0), DomainError);
  CHECK_THROWS_AS(g.quantile(1.0), DomainError);
}

TEST_CASE("sampling") {
  const BgmoDistribution d({1, 1, 1, 1}, kE1);
  CHECK(d.sample(50, 7) == d.sample(50, 7));
  CHECK(d.sample(50, 7) != d.sample(50, 8));
  const std::vector<double> xs = d.sample(20000, 1);
  CHECK(ks_distance(xs, [](double t) { return -std::expm1(-t); }) < 1.63 / std::sqrt(20000.0));
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  CHECK(std::fabs(mean - 1.0) < 3.0 / std::sqrt(20000.0));

  const BgmoDistribution g({2.0, 0.5, 1.5, 3.0}, Baseline::gompertz(1.0, 0.5));
  const std::vector<double> ys = g.sample(20000, 3);
  CHECK(ks_distance(ys, [&](double t) { return g.cdf(t); }) < 1.63 / std::sqrt(20000.0));
  CHECK_THROWS_AS(d.sample(0, 1), DomainError);
}

TEST_CASE("order statistic genesis") {
  const Baseline b = Baseline::weibull(1.0, 1.5);
  const double alpha = 0.7, theta = 1.8;
  for (auto [m, n] : {std::pair{2, 2}, std::pair{3, 1}, std::pair{1, 3}}) {
    const BgmoDistribution d({double(m), double(n), theta, alpha}, b);
    std::mt19937_64 rng(2024 + m);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> stats;
    std::vector<double> draws(m + n - 1);
    for (int rep = 0; rep < 20000; ++rep) {
      for (auto& x : draws) x = gmo_variate(alpha, theta, b, unif(rng));
      std::nth_element(draws.begin(), draws.begin() + (m - 1), draws.end());
      stats.push_back(draws[m - 1]);
    }
    CHECK(ks_distance(stats, [&](double t) { return d.cdf(t); }) < 1.63 / std::sqrt(20000.0));
  }
}

TEST_CASE("normalization over a parameter grid") {
  const std::vector<Baseline> bases = {kE1, Baseline::weibull(1.0, 2.0), Baseline::lomax(2.0, 1.0),
                                       Baseline::frechet(2.0, 1.0)};
  int cases = 0;
  for (const Baseline& b : bases) {
    for (double m : {0.5, 1.0, 3.0}) {
      for (double n : {0.5, 1.0, 3.0}) {
        for (double th : {0.5, 1.0, 2.0}) {
          for (double a : {0.3, 1.0, 4.0}) {
            const BgmoDistribution d({m, n, th, a}, b);
            CHECK(oracle::integrate_log(b, [&](double t) { return d.log_pdf(t); }) ==
                  doctest::Approx(1.0).epsilon(1e-6));
            ++cases;
          }
        }
      }
    }
  }
  CHECK(cases == 324);
}

TEST_CASE("log-space density in the tails") {
  const BgmoDistribution d({3.0, 0.4, 2.0, 0.5}, Baseline::weibull(1.0, 2.0));
  for (double t : {1e-6, 1e-3, 5.0, 10.0, 20.0}) {
    const double lp = d.log_pdf(t);
    CHECK(std::isfinite(lp));
    if (lp > -700.0) CHECK(d.pdf(t) > 0.0);
  }
  // Far tail: log f ≈ log(θ h) + θn log(αḠ) - log B, so it falls like -θnλt^β.
  const double lp = d.log_pdf(1e4);
  CHECK(std::isfinite(lp));
  CHECK(lp == doctest::Approx(-2.0 * 0.4 * 1e8).epsilon(1e-6));
}

TEST_CASE("Bowley skewness and Moors kurtosis") {
  const BgmoDistribution e({1, 1, 1, 1}, kE1);
  auto q = [](double p) { return -std::log1p(-p); };
  const double bowley = (q(0.75) + q(0.25) - 2 * q(0.5)) / (q(0.75) - q(0.25));
  CHECK(bowley_skewness(e) == doctest::Approx(bowley).epsilon(1e-10));
  CHECK(bowley_skewness(e) == doctest::Approx(0.2619).epsilon(1e-3));
  const double moors = (q(3.0 / 8) - q(1.0 / 8) + q(7.0 / 8) - q(5.0 / 8)) / (q(6.0 / 8) - q(2.0 / 8));
  CHECK(moors_kurtosis(e) == doctest::Approx(moors).epsilon(1e-10));
  CHECK(moors_kurtosis(e) == doctest::Approx(1.3063).epsilon(1e-4));
  CHECK_THROWS_AS(bowley_from_quantiles(1.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(moors_from_octiles(1, 2, 3, 4, 2, 5), DomainError);
  const BgmoDistribution d({0.3, 4.0, 0.5, 7.0}, Baseline::lomax(0.8, 1.0));
  CHECK(std::fabs(bowley_skewness(d)) <= 1.0);
}

TEST_CASE("reduction checks") {
  CHECK(reduction_check(BgmoDistribution({1, 1, 1, 1}, kE1), ReductionTarget::MO) <= 1e-14);
  CHECK(reduction_check(BgmoDistribution({2, 3, 1, 2}, kE1), ReductionTarget::BMO) <= 1e-12);
  CHECK(reduction_check(BgmoDistribution({1, 1, 2, 3}, kE1), ReductionTarget::GMO) <= 1e-12);
  CHECK(reduction_check(BgmoDistribution({0.4, 2.5, 1, 1}, Baseline::weibull(1, 2)), ReductionTarget::BetaG) <= 1e-12);
  CHECK_THROWS_AS(reduction_check(BgmoDistribution({2, 3, 1.5, 2}, kE1), ReductionTarget::BMO), PreconditionError);
  CHECK_THROWS_AS(reduction_check(BgmoDistribution({2, 1, 1, 2}, kE1), ReductionTarget::GMO), PreconditionError);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(BgmoDistribution({0, 1, 1, 1}, kE1), DomainError);
  CHECK_THROWS_AS(BgmoDistribution({1, 1, 1, -2}, kE1), DomainError);
  CHECK_THROWS_AS(BgmoDistribution({1, std::nan(""), 1, 1}, kE1), DomainError);
}
