#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kdml/evaluation.hpp"

namespace kdml::cli {

// Exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kNumerical = 3 };

// Dispatches `args` (without the program name) to a subcommand:
// train, eval, grid, embed, gen-circles.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct GridConfig {
  std::string data;
  std::string label;
  Method method = Method::fixed;
  HyperGrid grid;
  int runs = 0;
  double train_fraction = 0.5;
  int folds = 3;
  std::uint64_t seed = 1;
};

/// key=value lines; '#' starts a comment. Grid keys (gamma, lambda, rho, dim,
/// sigma, k) take comma-separated lists. Required: data, label, method, runs.
/// Throws ConfigError on anything malformed.
GridConfig parse_grid_config(const std::string& text);

// The text cmd_grid prints for a report; bit-for-bit stable for fixed input.
std::string format_report(const EvalReport& report, Method method);

}  // namespace kdml::cli
