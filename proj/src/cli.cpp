#include "bgmo/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "bgmo/data.hpp"
#include "bgmo/error.hpp"
#include "bgmo/estimate.hpp"

namespace bgmo::cli {

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::pair<std::string, double> parse_assignment(const std::string& token) {
  const auto eq = token.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == token.size()) {
    throw DomainError("expected name=value, got '" + token + "'");
  }
  const std::string value = token.substr(eq + 1);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size()) throw DomainError("'" + value + "' is not a number in '" + token + "'");
  return {token.substr(0, eq), v};
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

// Output goes to `path` when given, else to the default stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot open output file '" + path + "'");
    }
    stream_ = path.empty() ? &fallback : &file_;
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

struct ModelOptions {
  double m = 1.0;
  double n = 1.0;
  double theta = 1.0;
  double alpha = 1.0;
  std::vector<std::string> baseline = {"exponential", "lambda=1"};

  void add(CLI::App* app) {
    app->add_option("--m", m, "first beta shape")->capture_default_str();
    app->add_option("--n", n, "second beta shape")->capture_default_str();
    app->add_option("--theta", theta, "Lehmann-II exponent")->capture_default_str();
    app->add_option("--alpha", alpha, "Marshall-Olkin tilt")->capture_default_str();
    app->add_option("--baseline", baseline,
                    "baseline family and parameters, e.g. weibull lambda=1 beta=2")
        ->expected(1, -1);
  }
  BgmoDistribution distribution() const {
    return BgmoDistribution({m, n, theta, alpha}, parse_baseline(baseline));
  }
};

struct FitOptions {
  std::uint64_t seed = 1;
  int starts = 24;
  int max_iter = 2000;
  double level = 0.95;

  void add(CLI::App* app) {
    app->add_option("--seed", seed, "seed of the multi-start sequence")->capture_default_str();
    app->add_option("--starts", starts, "number of simplex starts")->capture_default_str();
    app->add_option("--max-iter", max_iter, "simplex iterations per run")->capture_default_str();
    app->add_option("--level", level, "confidence level of the Wald intervals")
        ->capture_default_str();
  }
  est::FitConfig config() const {
    est::FitConfig c;
    c.seed = seed;
    c.starts = starts;
    c.max_iter = max_iter;
    c.gamma = 1.0 - level;
    return c;
  }
};

est::ModelTemplate make_template(const std::string& kind, const std::vector<std::string>& baseline,
                                 const std::vector<std::string>& fixes) {
  est::ModelTemplate t = est::ModelTemplate::from_kind(kind, parse_baseline(baseline));
  for (const auto& f : fixes) {
    const auto [name, value] = parse_assignment(f);
    t.fix(name, value);
  }
  return t;
}

// "kind:baseline[:name=value...]" as used by `compare`; each name=value
// holds that parameter fixed.
est::ModelTemplate template_from_string(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() < 2) {
    throw DomainError("model '" + spec + "' must look like kind:baseline[:name=value...]");
  }
  return make_template(parts[0], {parts[1]}, std::vector<std::string>(parts.begin() + 2, parts.end()));
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] =
        count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  }
  return out;
}

double evaluate(const BgmoDistribution& d, const std::string& fn, double t) {
  if (fn == "pdf") return d.pdf(t);
  if (fn == "cdf") return d.cdf(t);
  if (fn == "sf") return d.sf(t);
  if (fn == "hrf") return d.pdf(t) == 0.0 ? 0.0 : d.hrf(t).value;
  if (fn == "rhrf") return d.pdf(t) == 0.0 ? 0.0 : d.rhrf(t).value;
  if (fn == "chrf") return d.chrf(t);
  throw DomainError("unknown function '" + fn + "'");
}

void write_fit_table_row(std::ostream& os, std::size_t rank, const std::string& label,
                         const est::FitResult* fit, const std::string& status) {
  os << rank << '\t' << label;
  if (fit != nullptr) {
    os << '\t' << fmt(fit->log_likelihood) << '\t' << fmt(fit->criteria.aic) << '\t'
       << fmt(fit->criteria.bic) << '\t'
       << (fit->criteria.caic_defined ? fmt(fit->criteria.caic) : std::string("nan")) << '\t'
       << fmt(fit->criteria.hqic);
  } else {
    os << "\tnan\tnan\tnan\tnan\tnan";
  }
  os << '\t' << status << '\n';
}

}  // namespace

Baseline parse_baseline(const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw DomainError("baseline family missing");
  const std::string& family = tokens[0];
  std::map<std::string, double> params;
  std::string z_kind = "linear";
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (tokens[i].rfind("z=", 0) == 0) {
      z_kind = tokens[i].substr(2);
      continue;
    }
    const auto [name, value] = parse_assignment(tokens[i]);
    params[name] = value;
  }
  for (const auto& name : Baseline::unit(family, z_kind).param_names()) params.emplace(name, 1.0);
  return Baseline::from_spec(family, params, z_kind);
}

BgmoDistribution parse_distribution(const std::string& spec) {
  BgmoParams p;
  std::vector<std::string> baseline;
  for (const auto& tok : split_ws(spec)) {
    if (tok.find('=') != std::string::npos) {
      const auto [name, value] = parse_assignment(tok);
      if (name == "m") {
        p.m = value;
      } else if (name == "n") {
        p.n = value;
      } else if (name == "theta") {
        p.theta = value;
      } else if (name == "alpha") {
        p.alpha = value;
      } else {
        baseline.push_back(tok);
      }
    } else {
      if (!baseline.empty()) throw DomainError("baseline family given twice in '" + spec + "'");
      baseline.push_back(tok);
    }
  }
  if (baseline.empty()) throw DomainError("no baseline family in '" + spec + "'");
  return BgmoDistribution(p, parse_baseline(baseline));
}

Histogram histogram(const std::vector<double>& values, int bins) {
  if (values.empty()) throw DomainError("cannot build a histogram of an empty dataset");
  std::vector<double> v = values;
  std::sort(v.begin(), v.end());
  const double lo = v.front();
  const double hi = v.back();
  auto quantile7 = [&](double p) {
    const double h = (static_cast<double>(v.size()) - 1.0) * p;
    const auto i = static_cast<std::size_t>(std::floor(h));
    const std::size_t j = std::min(i + 1, v.size() - 1);
    return v[i] + (h - static_cast<double>(i)) * (v[j] - v[i]);
  };
  int count = bins;
  if (count <= 0) {
    const double width = 2.0 * (quantile7(0.75) - quantile7(0.25)) /
                         std::cbrt(static_cast<double>(v.size()));
    count = (width > 0.0 && hi > lo) ? static_cast<int>(std::ceil((hi - lo) / width)) : 1;
    count = std::max(count, 1);
  }
  Histogram h;
  const double span = hi > lo ? hi - lo : 1.0;
  const double width = span / count;
  for (int i = 0; i <= count; ++i) h.edges.push_back(lo + width * i);
  std::vector<double> counts(static_cast<std::size_t>(count), 0.0);
  for (double x : v) {
    auto bin = static_cast<int>((x - lo) / width);
    bin = std::clamp(bin, 0, count - 1);
    counts[static_cast<std::size_t>(bin)] += 1.0;
  }
  for (double c : counts) h.density.push_back(c / (static_cast<double>(v.size()) * width));
  return h;
}

std::vector<std::string> default_gallery() {
  return {
      "m=1 n=1 theta=1 alpha=1 exponential lambda=1",
      "m=2 n=1.5 theta=0.8 alpha=2 exponential lambda=1",
      "m=0.5 n=0.5 theta=1 alpha=1 weibull lambda=1 beta=2",
      "m=2 n=0.5 theta=0.5 alpha=0.5 weibull lambda=1 beta=0.6",
      "m=5 n=0.3 theta=2 alpha=3 weibull lambda=1 beta=0.5",
      "m=3 n=2 theta=1.5 alpha=0.3 lomax beta=2 delta=1",
  };
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Beta generalized Marshall-Olkin-G distributions: evaluation, sampling and fitting", "bgmo"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Print help for every subcommand and exit");

  // eval
  ModelOptions eval_model;
  std::string eval_fn = "pdf";
  std::vector<double> eval_t;
  CLI::App* eval = app.add_subcommand("eval", "evaluate pdf, cdf, sf, hrf, rhrf or chrf");
  eval_model.add(eval);
  eval->add_option("--fn", eval_fn, "function")
      ->check(CLI::IsMember({"pdf", "cdf", "sf", "hrf", "rhrf", "chrf"}))
      ->capture_default_str();
  eval->add_option("--t", eval_t, "evaluation points")->required()->expected(1, -1);

  // quantile
  ModelOptions q_model;
  std::vector<double> q_u;
  CLI::App* quantile = app.add_subcommand("quantile", "evaluate the quantile function");
  q_model.add(quantile);
  quantile->add_option("--u", q_u, "probabilities in (0, 1)")->required()->expected(1, -1);

  // sample
  ModelOptions s_model;
  std::size_t s_count = 1;
  std::uint64_t s_seed = 1;
  CLI::App* sample = app.add_subcommand("sample", "draw random variates");
  s_model.add(sample);
  sample->add_option("--count", s_count, "number of draws")->required()->check(CLI::PositiveNumber);
  sample->add_option("--seed", s_seed, "random seed")->capture_default_str();

  // fit
  std::string f_data;
  std::string f_kind = "bgmo";
  std::vector<std::string> f_baseline = {"weibull"};
  std::vector<std::string> f_fix;
  std::string f_output;
  FitOptions f_opts;
  CLI::App* fit = app.add_subcommand("fit", "maximum-likelihood fit with a JSON report");
  fit->add_option("--data", f_data, "dataset file or builtin:<name>")->required();
  fit->add_option("--model", f_kind, "bgmo, bmo, gmo, mo or betag")->capture_default_str();
  fit->add_option("--baseline", f_baseline, "baseline family (parameters are estimated)")
      ->expected(1, -1);
  fit->add_option("--fix", f_fix, "hold a parameter fixed, name=value")->expected(1, -1);
  fit->add_option("--output", f_output, "write the report here instead of standard output");
  f_opts.add(fit);

  // compare
  std::string c_data;
  std::vector<std::string> c_models;
  std::string c_output;
  FitOptions c_opts;
  CLI::App* compare = app.add_subcommand("compare", "fit several models and rank them by AIC");
  compare->add_option("--data", c_data, "dataset file or builtin:<name>")->required();
  compare->add_option("--models", c_models, "models as kind:baseline[:name=value...]")
      ->required()
      ->expected(1, -1);
  compare->add_option("--output", c_output, "write the table here instead of standard output");
  c_opts.add(compare);

  // curves
  std::string cu_data;
  ModelOptions cu_model;
  bool cu_fit = false;
  std::string cu_kind = "bgmo";
  int cu_grid = 400;
  int cu_bins = 0;
  std::string cu_output;
  std::string cu_hist;
  FitOptions cu_opts;
  CLI::App* curves = app.add_subcommand("curves", "fitted pdf/cdf curves and histogram of a dataset");
  curves->add_option("--data", cu_data, "dataset file or builtin:<name>")->required();
  cu_model.add(curves);
  curves->add_flag("--fit", cu_fit, "fit the model first instead of using the given parameters");
  curves->add_option("--model", cu_kind, "model kind used with --fit")->capture_default_str();
  curves->add_option("--grid", cu_grid, "number of grid points")->capture_default_str()->check(
      CLI::Range(2, 1000000));
  curves->add_option("--bins", cu_bins, "histogram bins (0: Freedman-Diaconis)")
      ->capture_default_str();
  curves->add_option("--output", cu_output, "curve table path");
  curves->add_option("--hist-output", cu_hist, "histogram table path");
  cu_opts.add(curves);

  // shapes
  std::vector<std::string> sh_specs;
  std::string sh_fn = "pdf";
  int sh_grid = 400;
  double sh_tmin = std::numeric_limits<double>::quiet_NaN();
  double sh_tmax = std::numeric_limits<double>::quiet_NaN();
  std::string sh_output;
  CLI::App* shapes = app.add_subcommand("shapes", "pdf or hrf columns for a list of models");
  shapes->add_option("--spec", sh_specs,
                     "distribution, e.g. \"m=2 n=1 theta=1 alpha=1 weibull lambda=1 beta=2\"")
      ->expected(1, -1);
  shapes->add_option("--function", sh_fn, "pdf or hrf")
      ->check(CLI::IsMember({"pdf", "hrf"}))
      ->capture_default_str();
  shapes->add_option("--grid", sh_grid, "number of grid points")->capture_default_str()->check(
      CLI::Range(2, 1000000));
  shapes->add_option("--tmin", sh_tmin, "grid start");
  shapes->add_option("--tmax", sh_tmax, "grid end");
  shapes->add_option("--output", sh_output, "table path");

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (eval->parsed()) {
      const BgmoDistribution d = eval_model.distribution();
      out << "# t\t" << eval_fn << '\n';
      for (double t : eval_t) out << fmt(t) << '\t' << fmt(evaluate(d, eval_fn, t)) << '\n';
      return kSuccess;
    }
    if (quantile->parsed()) {
      const BgmoDistribution d = q_model.distribution();
      out << "# u\tquantile\n";
      for (double u : q_u) out << fmt(u) << '\t' << fmt(d.quantile(u)) << '\n';
      return kSuccess;
    }
    if (sample->parsed()) {
      const BgmoDistribution d = s_model.distribution();
      out << "# x\n";
      for (double x : d.sample(s_count, s_seed)) out << fmt(x) << '\n';
      return kSuccess;
    }
    if (fit->parsed()) {
      const data::Dataset ds = data::resolve_dataset(f_data);
      const est::ModelTemplate t = make_template(f_kind, f_baseline, f_fix);
      const est::FitResult r = est::fit_mle(t, ds.values, f_opts.config());
      Sink sink(f_output, out);
      *sink << est::to_json(r).dump(2) << '\n';
      if (!r.converged) {
        err << "warning: optimizer did not converge\n";
        return kNotConverged;
      }
      return kSuccess;
    }
    if (compare->parsed()) {
      if (c_models.size() < 2) {
        err << "error: compare needs at least two models\n";
        return kUsageError;
      }
      const data::Dataset ds = data::resolve_dataset(c_data);
      struct Row {
        std::string label;
        std::optional<est::FitResult> fit;
        std::string status;
      };
      std::vector<Row> rows;
      bool all_converged = true;
      for (const auto& spec : c_models) {
        Row row{spec, std::nullopt, "ok"};
        try {
          row.fit = est::fit_mle(template_from_string(spec), ds.values, c_opts.config());
          if (!row.fit->converged) {
            row.status = "not-converged";
            all_converged = false;
          }
        } catch (const DomainError&) {
          throw;
        } catch (const std::exception& e) {
          row.status = std::string("failed: ") + e.what();
          all_converged = false;
        }
        rows.push_back(std::move(row));
      }
      std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.fit.has_value() != b.fit.has_value()) return a.fit.has_value();
        if (!a.fit) return false;
        if (a.fit->criteria.aic != b.fit->criteria.aic) return a.fit->criteria.aic < b.fit->criteria.aic;
        return a.fit->criteria.bic < b.fit->criteria.bic;
      });
      Sink sink(c_output, out);
      *sink << "# rank\tmodel\tlogLik\taic\tbic\tcaic\thqic\tstatus\n";
      for (std::size_t i = 0; i < rows.size(); ++i) {
        write_fit_table_row(*sink, i + 1, rows[i].label, rows[i].fit ? &*rows[i].fit : nullptr,
                            rows[i].status);
      }
      return all_converged ? kSuccess : kNotConverged;
    }
    if (curves->parsed()) {
      const data::Dataset ds = data::resolve_dataset(cu_data);
      bool converged = true;
      BgmoDistribution d = cu_model.distribution();
      if (cu_fit) {
        std::vector<std::string> family = {cu_model.baseline.front()};
        const est::ModelTemplate t = make_template(cu_kind, family, {});
        const est::FitResult r = est::fit_mle(t, ds.values, cu_opts.config());
        converged = r.converged;
        d = t.distribution(r.full_estimates);
      }
      const auto [lo_it, hi_it] = std::minmax_element(ds.values.begin(), ds.values.end());
      const double range = *hi_it - *lo_it;
      const double pad = 0.05 * (range > 0.0 ? range : 1.0);
      {
        Sink sink(cu_output, out);
        *sink << "# t\tpdf\tcdf\n";
        for (double t : linspace(*lo_it - pad, *hi_it + pad, cu_grid)) {
          *sink << fmt(t) << '\t' << fmt(d.pdf(t)) << '\t' << fmt(d.cdf(t)) << '\n';
        }
        if (cu_hist.empty() && cu_output.empty()) *sink << '\n';
      }
      std::string hist_path = cu_hist;
      if (hist_path.empty() && !cu_output.empty()) hist_path = cu_output + ".hist";
      Sink sink(hist_path, out);
      const Histogram h = histogram(ds.values, cu_bins);
      *sink << "# bin_low\tbin_high\tdensity\n";
      for (std::size_t i = 0; i < h.density.size(); ++i) {
        *sink << fmt(h.edges[i]) << '\t' << fmt(h.edges[i + 1]) << '\t' << fmt(h.density[i]) << '\n';
      }
      return converged ? kSuccess : kNotConverged;
    }
    if (shapes->parsed()) {
      const std::vector<std::string> specs = sh_specs.empty() ? default_gallery() : sh_specs;
      std::vector<BgmoDistribution> models;
      for (const auto& s : specs) models.push_back(parse_distribution(s));
      double low = 0.0;
      double high = 0.0;
      for (const auto& d : models) {
        low = std::max(low, d.baseline().support_low());
        high = std::max(high, d.quantile(0.99));
      }
      const double tmax = std::isnan(sh_tmax) ? high : sh_tmax;
      const double tmin = std::isnan(sh_tmin) ? low + (tmax - low) / sh_grid : sh_tmin;
      if (!(tmax > tmin)) throw DomainError("shapes grid needs tmax > tmin");
      Sink sink(sh_output, out);
      *sink << "# t";
      for (const auto& s : specs) *sink << '\t' << s;
      *sink << '\n';
      for (double t : linspace(tmin, tmax, sh_grid)) {
        *sink << fmt(t);
        for (const auto& d : models) *sink << '\t' << fmt(evaluate(d, sh_fn, t));
        *sink << '\n';
      }
      return kSuccess;
    }
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kNotConverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace bgmo::cli
