#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bgmo/cli.hpp"
#include "bgmo/data.hpp"

using namespace bgmo;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "bgmo");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Rows of a tab-separated table, skipping '#' header lines and blank lines.
std::vector<std::vector<double>> table(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, '\t')) row.push_back(std::stod(field));
    rows.push_back(row);
  }
  return rows;
}

std::string header(const std::string& text) { return text.substr(0, text.find('\n')); }

// The curve table and the histogram table are separated by a blank line on stdout.
std::pair<std::string, std::string> split_blocks(const std::string& text) {
  const auto gap = text.find("\n\n");
  return {text.substr(0, gap + 1), text.substr(gap + 2)};
}

std::filesystem::path scratch(const std::string& leaf) {
  const auto dir = std::filesystem::temp_directory_path() / "bgmo_test_cli";
  std::filesystem::create_directories(dir);
  return dir / leaf;
}

}  // namespace

TEST_CASE("eval, quantile and sample pass through to the distribution") {
  const Outcome q = run({"quantile", "--u", "0.5", "--baseline", "exponential", "lambda=1"});
  CHECK(q.code == 0);
  REQUIRE(table(q.out).size() == 1);
  CHECK(table(q.out)[0][1] == doctest::Approx(std::log(2.0)).epsilon(1e-14));

  const Outcome e = run({"eval", "--fn", "pdf", "--t", "-1", "--baseline", "weibull", "lambda=1", "beta=2"});
  CHECK(e.code == 0);
  CHECK(table(e.out)[0][1] == 0.0);

  const Outcome many = run({"eval", "--fn", "cdf", "--t", "0.5", "1", "2", "--m", "2", "--n", "3",
                            "--theta", "0.5", "--alpha", "2", "--baseline", "exponential"});
  const BgmoDistribution d = cli::parse_distribution("m=2 n=3 theta=0.5 alpha=2 exponential lambda=1");
  const auto rows = table(many.out);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) CHECK(r[1] == doctest::Approx(d.cdf(r[0])).epsilon(1e-14));

  const Outcome s1 = run({"sample", "--count", "5", "--seed", "1", "--baseline", "exponential"});
  const Outcome s2 = run({"sample", "--count", "5", "--seed", "1", "--baseline", "exponential"});
  CHECK(s1.code == 0);
  CHECK(s1.out == s2.out);
  CHECK(table(s1.out).size() == 5);
  CHECK(run({"sample", "--count", "5", "--seed", "2", "--baseline", "exponential"}).out != s1.out);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == 1);
  CHECK(run({"bogus"}).code == 1);
  CHECK(run({"quantile", "--u", "1.5", "--baseline", "exponential"}).code == 1);
  CHECK(run({"eval", "--t", "1", "--m", "-2", "--baseline", "exponential"}).code == 1);
  CHECK(run({"eval", "--t", "1", "--baseline", "cauchy"}).code == 1);
  const Outcome missing = run({"fit", "--data", "missing.txt", "--baseline", "weibull"});
  CHECK(missing.code == 1);
  CHECK_FALSE(missing.err.empty());
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"fit", "--data", "builtin:turbocharger", "--baseline", "exp_pareto", "--fix", "theta_p=50",
             "--starts", "2"})
            .code == 2);
}

TEST_CASE("the installed executable honours the exit-code contract") {
  const std::string exe = BGMO_CLI_PATH;
  auto status = [&](const std::string& args) {
    const int raw = std::system((exe + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(raw);
  };
  CHECK(status("quantile --u 0.5 --baseline exponential") == 0);
  CHECK(status("fit --data missing.txt --baseline weibull") == 1);
}

TEST_CASE("fit reports") {
  const std::vector<std::string> args = {"fit", "--data", "builtin:turbocharger", "--model", "bgmo",
                                         "--baseline", "weibull", "--seed", "7"};
  const Outcome a = run(args);
  const Outcome b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const auto report = nlohmann::ordered_json::parse(a.out);
  std::vector<std::string> keys;
  for (const auto& [key, value] : report.items()) keys.push_back(key);
  CHECK(keys == std::vector<std::string>{"estimates", "se", "ci", "logLik", "aic", "bic", "caic", "hqic",
                                         "converged", "n", "k"});
  CHECK(report["aic"].get<double>() <= 173.8);
  CHECK(report["n"] == 40);
  CHECK(report["k"] == 6);
  for (const char* name : {"m", "n", "theta", "alpha", "lambda", "beta"}) {
    CHECK(report["estimates"].contains(name));
    CHECK(report["se"].contains(name));
    CHECK(report["ci"].contains(name));
  }

  const auto path = scratch("fit.json");
  CHECK(run({"fit", "--data", "builtin:turbocharger", "--model", "mo", "--baseline", "weibull", "--output",
             path.string()})
            .code == 0);
  std::ifstream in(path);
  CHECK(nlohmann::json::parse(in)["k"] == 3);
}

TEST_CASE("compare ranks by AIC") {
  const Outcome c = run({"compare", "--data", "builtin:turbocharger", "--models", "bgmo:weibull",
                         "mo:weibull"});
  CHECK(c.code == 0);
  std::istringstream in(c.out);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "# rank\tmodel\tlogLik\taic\tbic\tcaic\thqic\tstatus");
  CHECK(lines[1].rfind("1\tbgmo:weibull\t", 0) == 0);
  CHECK(lines[2].rfind("2\tmo:weibull\t", 0) == 0);

  CHECK(run({"compare", "--data", "builtin:turbocharger", "--models", "mo:weibull"}).code == 1);
  CHECK(run({"compare", "--data", "builtin:turbocharger", "--models", "mo:weibull", "mo:weibull:sigma=2"}).code ==
        1);

  const Outcome twin = run({"compare", "--data", "builtin:turbocharger", "--models", "mo:exponential",
                            "mo:exponential"});
  std::istringstream tin(twin.out);
  std::getline(tin, line);
  std::string r1, r2;
  std::getline(tin, r1);
  std::getline(tin, r2);
  // Everything after the model label must agree.
  CHECK(r1.substr(r1.find('\t', r1.find('\t') + 1)) == r2.substr(r2.find('\t', r2.find('\t') + 1)));
}

TEST_CASE("curves") {
  const Outcome c = run({"curves", "--data", "builtin:turbocharger", "--m", "1.187", "--n", "2.057", "--theta",
                         "0.017", "--alpha", "0.047", "--baseline", "weibull", "lambda=0.009", "beta=4.194"});
  CHECK(c.code == 0);
  const auto [curve_text, hist_text] = split_blocks(c.out);
  CHECK(header(curve_text) == "# t\tpdf\tcdf");
  CHECK(header(hist_text) == "# bin_low\tbin_high\tdensity");
  const auto curve = table(curve_text);
  REQUIRE(curve.size() == 400);
  const double range = 9.0 - 1.6;
  CHECK(curve.front()[0] == doctest::Approx(1.6 - 0.05 * range).epsilon(1e-14));
  CHECK(curve.back()[0] == doctest::Approx(9.0 + 0.05 * range).epsilon(1e-14));
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += 0.5 * (curve[i][1] + curve[i - 1][1]) * (curve[i][0] - curve[i - 1][0]);
  }
  CHECK(std::fabs(area - 1.0) <= 0.02);
  for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i][2] >= curve[i - 1][2]);

  double mass = 0.0;
  for (const auto& bin : table(hist_text)) mass += bin[2] * (bin[1] - bin[0]);
  CHECK(std::fabs(mass - 1.0) <= 1e-12);

  const auto path = scratch("curves.tsv");
  CHECK(run({"curves", "--data", "builtin:nicotine", "--grid", "50", "--bins", "7", "--baseline", "weibull",
             "--output", path.string()})
            .code == 0);
  std::ifstream hist(path.string() + ".hist");
  std::stringstream buffer;
  buffer << hist.rdbuf();
  CHECK(table(buffer.str()).size() == 7);

  const Outcome fitted = run({"curves", "--data", "builtin:turbocharger", "--fit", "--baseline", "weibull"});
  CHECK(fitted.code == 0);
  const auto fitted_curve = table(split_blocks(fitted.out).first);
  double fitted_area = 0.0;
  for (std::size_t i = 1; i < fitted_curve.size(); ++i) {
    fitted_area += 0.5 * (fitted_curve[i][1] + fitted_curve[i - 1][1]) *
                   (fitted_curve[i][0] - fitted_curve[i - 1][0]);
  }
  CHECK(std::fabs(fitted_area - 1.0) <= 0.02);
}

TEST_CASE("Freedman-Diaconis histogram") {
  const auto values = data::builtin_dataset("carbon_fibres").values;
  const cli::Histogram h = cli::histogram(values);
  double mass = 0.0;
  for (std::size_t i = 0; i < h.density.size(); ++i) mass += h.density[i] * (h.edges[i + 1] - h.edges[i]);
  CHECK(std::fabs(mass - 1.0) <= 1e-12);
  CHECK(h.edges.front() == 0.39);
  CHECK(h.edges.back() == doctest::Approx(5.56).epsilon(1e-14));
  CHECK(cli::histogram({2.0, 2.0, 2.0}).density.size() == 1);
  CHECK_THROWS(cli::histogram({}));
}

TEST_CASE("shapes") {
  const Outcome dec = run({"shapes", "--spec", "m=1 n=1 theta=1 alpha=1 exponential lambda=1"});
  CHECK(dec.code == 0);
  const auto rows = table(dec.out);
  REQUIRE(rows.size() > 2);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][1] < rows[i - 1][1]);

  const std::string spec = "m=2 n=0.5 theta=0.5 alpha=0.5 weibull lambda=1 beta=0.6";
  const auto pdf = table(run({"shapes", "--function", "pdf", "--spec", spec}).out);
  const auto hrf = table(run({"shapes", "--function", "hrf", "--spec", spec}).out);
  const BgmoDistribution d = cli::parse_distribution(spec);
  REQUIRE(pdf.size() == hrf.size());
  for (std::size_t i = 0; i < pdf.size(); ++i) {
    CHECK(hrf[i][0] == pdf[i][0]);
    const double ratio = pdf[i][1] / (1.0 - d.cdf(pdf[i][0]));
    CHECK(std::fabs(hrf[i][1] - ratio) <= 1e-10 * std::max(1.0, std::fabs(ratio)));
  }

  const Outcome gallery = run({"shapes", "--function", "hrf", "--grid", "400"});
  CHECK(gallery.code == 0);
  const auto g = table(gallery.out);
  const std::size_t columns = cli::default_gallery().size();
  REQUIRE(g.front().size() == columns + 1);
  bool found = false;
  for (std::size_t c = 1; c <= columns; ++c) {
    int changes = 0;
    double previous = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) {
      const double slope = g[i][c] - g[i - 1][c];
      if (slope != 0.0) {
        if (previous != 0.0 && (slope > 0.0) != (previous > 0.0)) ++changes;
        previous = slope;
      }
    }
    found = found || changes > 0;
  }
  CHECK(found);
  CHECK(run({"shapes", "--tmin", "3", "--tmax", "1"}).code == 1);
}
