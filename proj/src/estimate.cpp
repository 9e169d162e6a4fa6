#include "bgmo/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>

#include "bgmo/error.hpp"
#include "bgmo/optimize.hpp"

namespace bgmo::est {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kFamily = 4;  // m, n, theta, alpha precede baseline parameters

}  // namespace

ModelTemplate::ModelTemplate(Baseline prototype, std::string name)
    : prototype_(std::move(prototype)),
      name_(std::move(name)),
      fixed_(kFamily + prototype_.params().size()) {}

ModelTemplate ModelTemplate::from_kind(std::string_view kind, Baseline prototype) {
  ModelTemplate t(std::move(prototype), std::string(kind));
  if (kind == "bgmo") return t;
  if (kind == "bmo") return t.fix("theta", 1.0);
  if (kind == "gmo") return t.fix("m", 1.0).fix("n", 1.0);
  if (kind == "mo") return t.fix("m", 1.0).fix("n", 1.0).fix("theta", 1.0);
  if (kind == "betag") return t.fix("alpha", 1.0).fix("theta", 1.0);
  throw DomainError("unknown model kind '" + std::string(kind) +
                    "' (expected bgmo, bmo, gmo, mo or betag)");
}

ModelTemplate& ModelTemplate::fix(std::string_view param, double value) {
  const auto names = param_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == param) {
      if (!(value > 0.0 && std::isfinite(value)) && !(i >= kFamily && value == 0.0)) {
        throw DomainError("fixed value for '" + names[i] + "' must be positive");
      }
      fixed_[i] = value;
      return *this;
    }
  }
  throw DomainError("model has no parameter '" + std::string(param) + "'");
}

std::vector<std::string> ModelTemplate::param_names() const {
  std::vector<std::string> names = {"m", "n", "theta", "alpha"};
  for (auto& b : prototype_.param_names()) names.push_back(b);
  return names;
}

std::vector<std::string> ModelTemplate::free_names() const {
  const auto all = param_names();
  std::vector<std::string> out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (is_free(i)) out.push_back(all[i]);
  }
  return out;
}

std::size_t ModelTemplate::n_free() const {
  return static_cast<std::size_t>(
      std::count_if(fixed_.begin(), fixed_.end(), [](const auto& f) { return !f.has_value(); }));
}

std::vector<double> ModelTemplate::expand(std::span<const double> free_values) const {
  if (free_values.size() != n_free()) {
    throw DomainError("expected " + std::to_string(n_free()) + " free parameter values");
  }
  std::vector<double> full(fixed_.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < fixed_.size(); ++i) {
    full[i] = fixed_[i] ? *fixed_[i] : free_values[k++];
  }
  return full;
}

std::vector<double> ModelTemplate::restrict_to_free(std::span<const double> full) const {
  std::vector<double> out;
  for (std::size_t i = 0; i < fixed_.size(); ++i) {
    if (is_free(i)) out.push_back(full[i]);
  }
  return out;
}

BgmoDistribution ModelTemplate::distribution(std::span<const double> full) const {
  if (full.size() != fixed_.size()) {
    throw DomainError("expected " + std::to_string(fixed_.size()) + " parameter values");
  }
  return BgmoDistribution({full[0], full[1], full[2], full[3]},
                          prototype_.with_params(full.subspan(kFamily)));
}

LogLikelihood log_likelihood(const ModelTemplate& model, std::span<const double> full,
                             std::span<const double> data) {
  const BgmoDistribution d = model.distribution(full);
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double lp = d.log_pdf(data[i]);
    if (!(lp > -kInf) || std::isnan(lp)) return {-kInf, i};
    total += lp;
  }
  return {total, std::nullopt};
}

namespace {

std::vector<double> finite_difference_score(const ModelTemplate& model, std::span<const double> full,
                                            std::span<const double> data) {
  std::vector<double> x(full.begin(), full.end());
  std::vector<double> grad(x.size());
  auto ll = [&](std::size_t i, double v) {
    std::vector<double> y = x;
    y[i] = v;
    return log_likelihood(model, y, data).value;
  };
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = 1e-3 * std::max(std::fabs(x[i]), 1e-8);
    const double f2p = ll(i, x[i] + 2.0 * h);
    const double f1p = ll(i, x[i] + h);
    const double f1m = ll(i, x[i] - h);
    const double f2m = ll(i, x[i] - 2.0 * h);
    grad[i] = (-f2p + 8.0 * f1p - 8.0 * f1m + f2m) / (12.0 * h);
  }
  return grad;
}

std::vector<double> analytic_score(const ModelTemplate& model, std::span<const double> full,
                                   std::span<const double> data) {
  const BgmoDistribution d = model.distribution(full);
  const BgmoParams& p = d.params();
  const Baseline& b = d.baseline();
  const std::size_t kb = b.params().size();
  std::vector<double> grad(kFamily + kb, 0.0);
  std::vector<double> d_log_g(kb);
  std::vector<double> d_log_sf(kb);

  const double psi_mn = specfun::digamma(p.m + p.n);
  const double base_m = -specfun::digamma(p.m) + psi_mn;
  const double base_n = -specfun::digamma(p.n) + psi_mn;
  const double alpha_bar = 1.0 - p.alpha;

  for (double t : data) {
    const BgmoLogTerms lt = d.log_terms(t);
    const MoTerms& mo = lt.mo;
    const double ls = mo.log_s;
    const double ratio = std::exp(lt.log_w - lt.log_w_comp);  // w / (1 - w)
    const double gbar_over_d = std::exp(mo.log_Gbar - mo.log_D);
    const double g_over_alpha_d = std::exp(mo.log_G - mo.log_D) / p.alpha;
    const double inv_d = std::exp(-mo.log_D);

    grad[0] += base_m + lt.log_w_comp;
    grad[1] += base_n + lt.log_w;
    grad[2] += 1.0 / p.theta + ls - (p.m - 1.0) * ratio * ls + (p.n - 1.0) * ls;
    grad[3] += p.theta / p.alpha - (p.theta + 1.0) * gbar_over_d -
               (p.m - 1.0) * p.theta * ratio * g_over_alpha_d +
               (p.n - 1.0) * p.theta * g_over_alpha_d;

    b.log_partials(t, d_log_g, d_log_sf);
    for (std::size_t k = 0; k < kb; ++k) {
      const double dls = d_log_sf[k];
      grad[kFamily + k] += d_log_g[k] + (p.theta - 1.0) * dls +
                           (p.theta + 1.0) * alpha_bar * gbar_over_d * dls -
                           (p.m - 1.0) * p.theta * ratio * dls * inv_d +
                           (p.n - 1.0) * p.theta * dls * inv_d;
    }
  }
  return grad;
}

}  // namespace

Score score(const ModelTemplate& model, std::span<const double> full, std::span<const double> data,
            ScoreMode mode) {
  Score out;
  if (mode == ScoreMode::Analytic) {
    if (model.prototype().has_partials()) {
      out.gradient = analytic_score(model, full, data);
      out.analytic = true;
      return out;
    }
    out.notice = "no analytic partials for baseline '" + model.prototype().tag() +
                 "'; using finite differences";
  }
  out.gradient = finite_difference_score(model, full, data);
  return out;
}

void FitConfig::validate() const {
  if (starts < 1 || screen < 1 || max_iter < 1 || !(f_tol > 0.0) || !(x_tol > 0.0) || !(log_bound > 0.0) ||
      !(gamma > 0.0 && gamma < 1.0)) {
    throw DomainError("fit configuration requires starts, max_iter >= 1, positive tolerances and "
                      "gamma in (0, 1)");
  }
  for (const auto& [lo, hi] : start_box) {
    if (!(lo <= hi)) throw DomainError("start box ranges need low <= high");
  }
}

InfoCriteria info_criteria(double log_l, int k, int n) {
  InfoCriteria c{};
  c.aic = 2.0 * k - 2.0 * log_l;
  c.bic = k * std::log(static_cast<double>(n)) - 2.0 * log_l;
  c.hqic = 2.0 * k * std::log(std::log(static_cast<double>(n))) - 2.0 * log_l;
  c.caic_defined = n > k + 1;
  c.caic = c.caic_defined ? c.aic + 2.0 * k * (k + 1.0) / (n - k - 1.0)
                          : std::numeric_limits<double>::quiet_NaN();
  return c;
}

double normal_critical(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in (0, 1)");
  return boost::math::quantile(boost::math::complement(boost::math::normal(), gamma / 2.0));
}

std::pair<double, double> wald_interval(double estimate, double std_error, double gamma) {
  if (!(std_error >= 0.0)) throw DomainError("standard error must be nonnegative");
  const double half = normal_critical(gamma) * std_error;
  return {estimate - half, estimate + half};
}

Matrix observed_information(const ModelTemplate& model, std::span<const double> free_hat,
                            std::span<const double> data) {
  const std::size_t k = free_hat.size();
  std::vector<double> x(free_hat.begin(), free_hat.end());
  std::vector<double> h(k);
  for (std::size_t i = 0; i < k; ++i) h[i] = std::max(1e-4 * std::fabs(x[i]), 1e-6);
  auto ll = [&](const std::vector<double>& y) {
    for (double v : y) {
      if (!(v > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    }
    try {
      return log_likelihood(model, model.expand(y), data).value;
    } catch (const DomainError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  auto shifted = [&](std::size_t i, double si, std::size_t j, double sj) {
    std::vector<double> y = x;
    y[i] += si * h[i];
    y[j] += sj * h[j];
    return ll(y);
  };
  const double f0 = ll(x);
  const auto names = model.free_names();
  Matrix info(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      double hess = 0.0;
      if (i == j) {
        hess = (shifted(i, 1.0, i, 0.0) - 2.0 * f0 + shifted(i, -1.0, i, 0.0)) / (h[i] * h[i]);
      } else {
        hess = (shifted(i, 1.0, j, 1.0) - shifted(i, 1.0, j, -1.0) - shifted(i, -1.0, j, 1.0) +
                shifted(i, -1.0, j, -1.0)) /
               (4.0 * h[i] * h[j]);
      }
      if (!std::isfinite(hess)) {
        throw NumericError("observed information entry (" + names[i] + ", " + names[j] +
                               ") is not finite",
                           hess);
      }
      info[i][j] = -hess;
      info[j][i] = -hess;
    }
  }
  return info;
}

bool invert_information(const Matrix& information, Matrix* inverse) {
  const auto k = static_cast<Eigen::Index>(information.size());
  Eigen::MatrixXd a(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) a(i, j) = information[i][j];
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) return false;
  const Eigen::MatrixXd inv = eig.eigenvectors() *
                              eig.eigenvalues().cwiseInverse().asDiagonal() *
                              eig.eigenvectors().transpose();
  inverse->assign(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k)));
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) (*inverse)[i][j] = 0.5 * (inv(i, j) + inv(j, i));
  }
  return true;
}

namespace {

double radical_inverse(std::uint64_t index, std::uint64_t base) {
  double result = 0.0;
  double f = 1.0 / static_cast<double>(base);
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= static_cast<double>(base);
  }
  return result;
}

constexpr std::uint64_t kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

// Moves baseline scale parameters of a start point to the data's scale so
// that the unit-free start box covers sensible values.
void rescale_start(const ModelTemplate& model, std::vector<double>& full, double mean,
                   double min_value) {
  const std::size_t o = kFamily;
  auto adjust = [&](std::size_t i, double factor) {
    if (model.is_free(o + i)) full[o + i] *= factor;
  };
  switch (model.prototype().family()) {
    case Family::Exponential: adjust(0, 1.0 / mean); break;
    case Family::Weibull: adjust(0, std::pow(mean, -full[o + 1])); break;
    case Family::Lomax: adjust(1, mean); break;
    case Family::Frechet: adjust(1, mean); break;
    case Family::Gompertz:
      adjust(0, 1.0 / mean);
      adjust(1, 1.0 / mean);
      break;
    case Family::ExtendedWeibull:
      switch (model.prototype().z_kind()) {
        case ZKind::Linear: adjust(0, 1.0 / mean); break;
        case ZKind::Square: adjust(0, 1.0 / (mean * mean)); break;
        case ZKind::LogRatio:
          if (model.is_free(o + 1)) full[o + 1] = min_value * std::min(full[o + 1], 20.0) / 21.0;
          break;
        case ZKind::GompertzLink:
          adjust(0, 1.0 / mean);
          adjust(1, 1.0 / mean);
          break;
      }
      break;
    case Family::ModifiedWeibull:
      adjust(0, 1.0 / mean);
      adjust(1, std::pow(mean, -full[o + 2]));
      break;
    case Family::ExponentiatedPareto:
      if (model.is_free(o)) full[o] = min_value * std::min(full[o], 20.0) / 21.0;
      break;
  }
}

struct StartOutcome {
  std::vector<double> y;  // log free parameters
  double neg_ll = kInf;
  bool converged = false;
  std::vector<double> trace;
};

bool better(const StartOutcome& a, const StartOutcome& b) {
  if (a.neg_ll != b.neg_ll) return a.neg_ll < b.neg_ll;
  return std::lexicographical_compare(a.y.begin(), a.y.end(), b.y.begin(), b.y.end());
}

}  // namespace

FitResult fit_mle(const ModelTemplate& model, std::span<const double> data, const FitConfig& config) {
  config.validate();
  if (data.empty()) throw DomainError("cannot fit an empty dataset");
  const std::size_t k = model.n_free();
  if (k == 0) throw DomainError("model has no free parameters");
  if (!config.start_box.empty() && config.start_box.size() != k) {
    throw DomainError("start box needs one range per free parameter");
  }
  const double mean = std::accumulate(data.begin(), data.end(), 0.0) / data.size();
  const double min_value = *std::min_element(data.begin(), data.end());

  auto to_free = [&](const std::vector<double>& y) {
    std::vector<double> x(k);
    for (std::size_t i = 0; i < k; ++i) {
      x[i] = std::exp(std::clamp(y[i], -config.log_bound, config.log_bound));
    }
    return x;
  };
  auto objective = [&](const std::vector<double>& y) {
    try {
      const double v = -log_likelihood(model, model.expand(to_free(y)), data).value;
      return std::isnan(v) ? kInf : v;
    } catch (const DomainError&) {
      return kInf;
    }
  };

  // Start points: Halton sequence with a seed-dependent rotation.
  std::mt19937_64 engine(config.seed);
  std::vector<double> rotation(k);
  for (auto& r : rotation) r = unit_uniform(engine());
  const std::size_t n_candidates =
      static_cast<std::size_t>(config.starts) * static_cast<std::size_t>(config.screen);
  std::vector<std::pair<double, std::size_t>> scored;
  std::vector<std::vector<double>> candidates(n_candidates);
  for (std::size_t s = 0; s < n_candidates; ++s) {
    std::vector<double> free(k);
    for (std::size_t i = 0; i < k; ++i) {
      double u = radical_inverse(s + 1, kPrimes[i % std::size(kPrimes)]) + rotation[i];
      u -= std::floor(u);
      const auto [lo, hi] = config.start_box.empty() ? std::pair{std::log(0.05), std::log(20.0)}
                                                     : config.start_box[i];
      free[i] = std::exp(lo + u * (hi - lo));
    }
    std::vector<double> full = model.expand(free);
    rescale_start(model, full, mean, min_value);
    std::vector<double> y(k);
    const std::vector<double> adjusted = model.restrict_to_free(full);
    for (std::size_t i = 0; i < k; ++i) y[i] = std::log(adjusted[i]);
    scored.emplace_back(objective(y), s);
    candidates[s] = std::move(y);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  // Half of the runs start from the leading Halton points, half from the
  // best-scoring candidates among the rest.
  std::vector<std::vector<double>> starts;
  const std::size_t n_plain = (static_cast<std::size_t>(config.starts) + 1) / 2;
  for (std::size_t s = 0; s < n_plain; ++s) starts.push_back(candidates[s]);
  for (const auto& [value, index] : scored) {
    if (starts.size() == static_cast<std::size_t>(config.starts)) break;
    if (index >= n_plain) starts.push_back(candidates[index]);
  }

  opt::NelderMeadOptions nm;
  nm.max_iter = config.max_iter;
  nm.f_tol = config.f_tol;
  nm.x_tol = config.x_tol;
  nm.record_trace = config.record_trace;

  auto run_start = [&](const std::vector<double>& y0) {
    StartOutcome out;
    out.y = y0;
    out.neg_ll = objective(y0);
    bool converged = false;
    for (int restart = 0; restart < 20; ++restart) {
      opt::NelderMeadResult r = opt::nelder_mead(objective, out.y, nm);
      for (auto& v : r.x) v = std::clamp(v, -config.log_bound, config.log_bound);
      out.trace.insert(out.trace.end(), r.trace.begin(), r.trace.end());
      const bool improved = r.f < out.neg_ll - config.f_tol * (1.0 + std::fabs(r.f));
      if (r.f <= out.neg_ll) {
        out.y = r.x;
        out.neg_ll = r.f;
      }
      converged = r.converged;
      if (!improved) break;
    }
    out.converged = converged;
    return out;
  };

  std::vector<StartOutcome> outcomes(starts.size());
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_threads = std::min<std::size_t>(
      starts.size(), config.threads > 0 ? static_cast<std::size_t>(config.threads) : hw);
  {
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < n_threads; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t s = w; s < starts.size(); s += n_threads) outcomes[s] = run_start(starts[s]);
      });
    }
    for (auto& th : workers) th.join();
  }

  // Polish: the leading outcomes are restarted from wide simplices, which
  // lets them leave slowly rising ridges, until they stop improving.
  {
    std::vector<std::size_t> order(outcomes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return better(outcomes[a], outcomes[b]); });
    const std::size_t n_polish = std::min<std::size_t>(4, order.size());
    for (std::size_t p = 0; p < n_polish; ++p) {
      StartOutcome& o = outcomes[order[p]];
      if (!std::isfinite(o.neg_ll)) continue;
      for (int round = 0; round < 10; ++round) {
        const double before = o.neg_ll;
        for (double step : {3.0, 0.5}) {
          opt::NelderMeadOptions wide = nm;
          wide.initial_step = step;
          opt::NelderMeadResult r = opt::nelder_mead(objective, o.y, wide);
          for (auto& v : r.x) v = std::clamp(v, -config.log_bound, config.log_bound);
          o.trace.insert(o.trace.end(), r.trace.begin(), r.trace.end());
          if (r.f <= o.neg_ll) {
            o.y = r.x;
            o.neg_ll = r.f;
            o.converged = r.converged;
          }
        }
        // Many optima sit on a face of the clamped box; try jumping each
        // coordinate to either face and descending from there.
        if (p < 2) {
          for (std::size_t i = 0; i < k; ++i) {
            for (double face : {-config.log_bound, config.log_bound}) {
              if (o.y[i] == face) continue;
              std::vector<double> y0 = o.y;
              y0[i] = face;
              opt::NelderMeadOptions local = nm;
              local.record_trace = false;
              opt::NelderMeadResult r = opt::nelder_mead(objective, y0, local);
              for (auto& v : r.x) v = std::clamp(v, -config.log_bound, config.log_bound);
              if (r.f < o.neg_ll) {
                o.y = r.x;
                o.neg_ll = r.f;
                o.converged = r.converged;
              }
            }
          }
        }
        if (!(o.neg_ll < before - config.f_tol * (1.0 + std::fabs(o.neg_ll)))) break;
      }
    }
  }

  FitResult result;
  const StartOutcome* best = nullptr;
  for (const auto& o : outcomes) {
    if (!std::isfinite(o.neg_ll)) continue;
    ++result.finite_starts;
    if (best == nullptr || better(o, *best)) best = &o;
  }
  if (best == nullptr) {
    std::ostringstream msg;
    msg << "fit failed: none of " << starts.size() << " starts produced a finite likelihood";
    const std::vector<double> probe = model.expand(to_free(starts[0]));
    const LogLikelihood ll = log_likelihood(model, probe, data);
    if (ll.bad_index) {
      msg << " (first start: observation " << *ll.bad_index << " = " << data[*ll.bad_index]
          << " has zero density)";
    }
    throw NumericError(msg.str(), kInf);
  }

  result.model = model.name();
  result.names = model.free_names();
  result.estimates = to_free(best->y);
  result.full_estimates = model.expand(result.estimates);
  result.log_likelihood = -best->neg_ll;
  result.converged = best->converged;
  result.trace = best->trace;
  result.n_obs = static_cast<int>(data.size());
  result.k_params = static_cast<int>(k);
  result.gamma = config.gamma;
  result.criteria = info_criteria(result.log_likelihood, result.k_params, result.n_obs);

  try {
    result.information = observed_information(model, result.estimates, data);
    result.information_pd = invert_information(result.information, &result.covariance);
    if (!result.information_pd) result.information_note = "observed information is not positive definite";
  } catch (const NumericError& e) {
    result.information_pd = false;
    result.information_note = e.what();
  }
  if (result.information_pd) {
    for (std::size_t i = 0; i < k; ++i) {
      const double se = std::sqrt(result.covariance[i][i]);
      result.std_errors.push_back(se);
      result.confidence_intervals.push_back(wald_interval(result.estimates[i], se, config.gamma));
    }
  }
  return result;
}

nlohmann::ordered_json to_json(const FitResult& fit) {
  using nlohmann::ordered_json;
  ordered_json estimates = ordered_json::object();
  ordered_json se = ordered_json::object();
  ordered_json ci = ordered_json::object();
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    estimates[fit.names[i]] = fit.estimates[i];
    if (fit.information_pd) {
      se[fit.names[i]] = fit.std_errors[i];
      ci[fit.names[i]] = {fit.confidence_intervals[i].first, fit.confidence_intervals[i].second};
    } else {
      se[fit.names[i]] = nullptr;
      ci[fit.names[i]] = nullptr;
    }
  }
  ordered_json j;
  j["estimates"] = estimates;
  j["se"] = se;
  j["ci"] = ci;
  j["logLik"] = fit.log_likelihood;
  j["aic"] = fit.criteria.aic;
  j["bic"] = fit.criteria.bic;
  if (fit.criteria.caic_defined) {
    j["caic"] = fit.criteria.caic;
  } else {
    j["caic"] = nullptr;
  }
  j["hqic"] = fit.criteria.hqic;
  j["converged"] = fit.converged;
  j["n"] = fit.n_obs;
  j["k"] = fit.k_params;
  return j;
}

}  // namespace bgmo::est
