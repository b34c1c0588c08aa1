#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "subdyadic/experiment.hpp"

using namespace subdyadic;

namespace {

std::string defaults_text(const ParamList& p) {
  std::string s;
  for (const auto& [k, v] : p) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s=%g", k.c_str(), v);
    s += (s.empty() ? "" : " ") + std::string(buf);
  }
  return s.empty() ? "-" : s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subdyadic square functions, maximal operators and the inequality harness"};
  app.require_subcommand(1);

  int workers = 0, dim = 0;
  long long seed = -1;
  std::string out;
  app.add_option("--workers", workers, "Worker threads (jobs run in parallel)")->check(CLI::PositiveNumber);
  app.add_option("--out", out, "Output directory (overrides the config and SUBDYADIC_OUT)");
  app.add_option("--seed", seed, "Corpus seed")->check(CLI::NonNegativeNumber);
  app.add_option("--dim", dim, "Dimension, 1 or 2")->check(CLI::IsMember({1, 2}));

  auto* run = app.add_subcommand("run", "Run the tests of a config file");
  std::string config;
  bool quiet = false;
  run->add_option("config", config, "Config file")->required();
  run->add_flag("-q,--quiet", quiet, "No progress lines");

  auto* list = app.add_subcommand("list", "Registered tests and their equation tags");

  auto* bench_cmd = app.add_subcommand("bench", "Time one operation over grid sizes");
  std::string op;
  std::vector<int> sizes;
  int repeats = 3;
  bench_cmd->add_option("op", op, "Operation")->required();
  bench_cmd->add_option("--sizes", sizes, "Grid sizes N")->required();
  bench_cmd->add_option("--repeats", repeats, "Best of this many runs")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      for (const auto& e : registry())
        std::printf("%-14s %-17s %-40s %s\n", e.name.c_str(), e.tag.c_str(), defaults_text(e.defaults).c_str(),
                    e.summary.c_str());
      return 0;
    }
    if (*bench_cmd) {
      const BenchReport r = bench(op, sizes, dim == 0 ? 1 : dim, repeats);
      std::printf("op,dim,N,seconds\n");
      for (std::size_t i = 0; i < r.sizes.size(); ++i)
        std::printf("%s,%d,%d,%.6g\n", r.op.c_str(), r.dim, r.sizes[i], r.seconds[i]);
      if (r.sizes.size() >= 2) std::printf("# fitted exponent vs M log M (M = N^d): %.3f\n", r.fitted_exponent);
      return 0;
    }
    ExperimentConfig cfg = load_config(config);
    if (const char* env = std::getenv("SUBDYADIC_OUT"); env && *env) cfg.out_dir = env;
    if (!out.empty()) cfg.out_dir = out;
    if (workers > 0) cfg.workers = workers;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (dim > 0) cfg.dim = dim;
    const RunResult res = run_experiments(cfg, quiet ? nullptr : &std::cerr);
    std::cerr << res.outcomes.size() << " result(s) in " << cfg.out_dir << ", exit " << res.status << "\n";
    return res.status;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
