#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bgmo/bgmo.hpp"

namespace bgmo::est {

// A BGMO-G model over a fixed baseline family with some parameters
// optionally held fixed. The full parameter vector is
// (m, n, theta, alpha, baseline parameters in Baseline::param_names order).
class ModelTemplate {
 public:
  explicit ModelTemplate(Baseline prototype, std::string name = "bgmo");

  // Named sub-models: bgmo (all free), bmo (theta = 1), gmo (m = n = 1),
  // mo (m = n = theta = 1), betag (alpha = theta = 1).
  static ModelTemplate from_kind(std::string_view kind, Baseline prototype);

  ModelTemplate& fix(std::string_view param, double value);

  const std::string& name() const { return name_; }
  const Baseline& prototype() const { return prototype_; }
  std::vector<std::string> param_names() const;
  std::vector<std::string> free_names() const;
  std::size_t n_params() const { return fixed_.size(); }
  std::size_t n_free() const;
  bool is_free(std::size_t index) const { return !fixed_[index].has_value(); }

  // Full parameter vector from the free values, in order.
  std::vector<double> expand(std::span<const double> free_values) const;
  std::vector<double> restrict_to_free(std::span<const double> full) const;
  BgmoDistribution distribution(std::span<const double> full) const;

 private:
  Baseline prototype_;
  std::string name_;
  std::vector<std::optional<double>> fixed_;
};

struct LogLikelihood {
  double value;                           // -∞ when some observation has zero density
  std::optional<std::size_t> bad_index;   // first such observation
};

LogLikelihood log_likelihood(const ModelTemplate& model, std::span<const double> full,
                             std::span<const double> data);

enum class ScoreMode { Analytic, FiniteDifference };

struct Score {
  std::vector<double> gradient;  // with respect to every entry of the full vector
  bool analytic = false;
  std::string notice;            // set when Analytic fell back to differencing
};

Score score(const ModelTemplate& model, std::span<const double> full, std::span<const double> data,
            ScoreMode mode);

struct FitConfig {
  int starts = 24;
  // Candidate points scored per start; the best `starts` of them seed the
  // simplex runs.
  int screen = 32;
  int max_iter = 2000;
  double f_tol = 1e-9;
  double x_tol = 1e-8;
  std::uint64_t seed = 1;
  // Log-space sampling range per free parameter; empty means
  // [ln 0.05, ln 20] for every parameter.
  std::vector<std::pair<double, double>> start_box;
  // Log-parameters are clamped to [-log_bound, log_bound].
  double log_bound = 25.0;
  int threads = 0;  // 0: hardware concurrency
  double gamma = 0.05;
  bool record_trace = false;

  void validate() const;
};

struct InfoCriteria {
  double aic;
  double bic;
  double caic;  // NaN when n <= k + 1
  double hqic;
  bool caic_defined;
};

InfoCriteria info_criteria(double log_l, int k, int n);

// z_{γ/2}, the upper γ/2 standard normal point.
double normal_critical(double gamma);
std::pair<double, double> wald_interval(double estimate, double std_error, double gamma);

using Matrix = std::vector<std::vector<double>>;

struct FitResult {
  std::string model;
  std::vector<std::string> names;      // free parameter names
  std::vector<double> estimates;       // free parameters
  std::vector<double> full_estimates;  // full parameter vector
  double log_likelihood = 0.0;
  Matrix information;
  Matrix covariance;
  std::vector<double> std_errors;
  std::vector<std::pair<double, double>> confidence_intervals;
  bool information_pd = false;  // intervals are empty when false
  std::string information_note;
  InfoCriteria criteria{};
  double gamma = 0.05;
  bool converged = false;
  int n_obs = 0;
  int k_params = 0;
  int finite_starts = 0;
  std::vector<double> trace;  // -logL after each simplex iteration of the winning start
};

FitResult fit_mle(const ModelTemplate& model, std::span<const double> data,
                  const FitConfig& config = {});

// Negative Hessian of the log-likelihood in the free parameters by central
// differences, step h_i = max(1e-4·|x_i|, 1e-6). Throws NumericError naming
// the parameter pair on a non-finite entry.
Matrix observed_information(const ModelTemplate& model, std::span<const double> free_hat,
                            std::span<const double> data);

// True when every eigenvalue is positive; fills `inverse` in that case.
bool invert_information(const Matrix& information, Matrix* inverse);

nlohmann::ordered_json to_json(const FitResult& fit);

}  // namespace bgmo::est
