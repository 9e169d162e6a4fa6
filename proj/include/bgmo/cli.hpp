#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bgmo/bgmo.hpp"

namespace bgmo::cli {

enum ExitCode : int { kSuccess = 0, kUsageError = 1, kNotConverged = 2 };

// Runs one command line (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Baseline from tokens such as {"weibull", "lambda=1", "beta=2"}; missing
// parameters default to 1. extended_weibull also accepts "z=<variant>".
Baseline parse_baseline(const std::vector<std::string>& tokens);

// Whole distribution from one string, e.g.
// "m=2 n=1 theta=0.5 alpha=2 weibull lambda=1 beta=2". m, n, theta and
// alpha default to 1.
BgmoDistribution parse_distribution(const std::string& spec);

struct Histogram {
  std::vector<double> edges;    // bins + 1 edges
  std::vector<double> density;  // count / (n · width)
};

// Freedman-Diaconis bin width 2·IQR·n^(-1/3) over [min, max]; `bins` > 0
// overrides the rule.
Histogram histogram(const std::vector<double>& values, int bins = 0);

// Parameter sets emitted by `shapes` when no model is given.
std::vector<std::string> default_gallery();

}  // namespace bgmo::cli
