#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "subdyadic/grid.hpp"

namespace subdyadic {

using ParamList = std::vector<std::pair<std::string, double>>;

/// Bad configuration or inadmissible parameters; maps to exit status 3.
struct ConfigError : Error {
  using Error::Error;
};

/// Plain key = value file:
///
///   tests  = ["thm1", "thm3"]
///   alpha  = [2, 0.5]        # lists span a parameter grid
///   beta   = 1
///   dim    = 1
///   sizes  = [128, 256, 512]
///   length = 64              # optional; default depends on alpha
///   seed   = 1
///   out    = "results"
///   workers = 1
///
/// Parameter keys: alpha beta sigma lambda p q s k R a b gamma. `s` is a
/// list consumed whole by the dispersive test; every other key spans the grid.
struct ExperimentConfig {
  std::vector<std::string> tests;
  std::map<std::string, std::vector<double>> grid;
  int dim = 1;
  std::vector<int> sizes;
  double length = 0.0;
  std::uint64_t seed = 1;
  std::string out_dir = "results";
  int workers = 1;
};

ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

/// One summary row.
struct Outcome {
  std::string test;
  std::string name;
  std::string tag;
  ParamList params;
  double constant = 0.0;
  /// stable | growing | violated (inequalities, chains), bounded | growing (scans)
  std::string verdict;
  /// JSON text of the full report.
  std::string json;
  /// Refinement trend (sizes, constants), plotted per test.
  std::vector<int> sizes;
  std::vector<double> trend;
  /// Per-scale energy (t, t^{-2 beta} ||f * phi_t||^2) of one corpus member, if any.
  std::vector<double> energy_t;
  std::vector<double> energy;
  /// For region scans: the (1/p, 1/q) point and its fitted exponent.
  double fitted_exponent = 0.0;

  std::string csv_row() const;
  static std::string csv_header();
};

struct RunContext {
  int dim = 1;
  std::vector<int> sizes;
  double length = 0.0;
  std::uint64_t seed = 1;
  std::vector<double> s_grid;
};

struct RegistryEntry {
  std::string name;
  /// Label of the tested statement in the source text.
  std::string tag;
  std::string summary;
  /// Grid keys the test consumes, with defaults for keys the config omits.
  ParamList defaults;
  /// Empty when admissible, otherwise the violated rule.
  std::function<std::string(const ParamList&, const RunContext&)> check;
  std::function<std::vector<Outcome>(const ParamList&, const RunContext&)> run;
};

const std::vector<RegistryEntry>& registry();
/// Throws ConfigError for unknown names.
const RegistryEntry& find_test(const std::string& name);

/// Exit status for a set of verdicts: 0 stable/bounded, 1 growing, 2 violated.
int exit_status(const std::vector<Outcome>& outcomes);

struct RunResult {
  int status = 0;
  std::vector<Outcome> outcomes;
};

/// Checks every job's admissibility, runs the jobs on `workers` threads and
/// writes summary.csv, report-<test>.json and plot-<test>.svg to out_dir
/// through a single collector, in job order.
RunResult run_experiments(const ExperimentConfig& cfg, std::ostream* log = nullptr);

struct BenchReport {
  std::string op;
  int dim = 1;
  std::vector<int> sizes;
  std::vector<double> seconds;
  /// Slope of log time against log(N^d log N^d).
  double fitted_exponent = 0.0;
};

/// Operations: fft, g, gstar, s_phi, hl_maximal, hl_maximal_naive,
/// subdyadic_maximal, nikodym_maximal (d = 2). Throws ConfigError for
/// unknown names.
BenchReport bench(const std::string& op, const std::vector<int>& sizes, int dim = 1, int repeats = 3);
std::vector<std::string> bench_ops();

}  // namespace subdyadic
