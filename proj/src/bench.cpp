#include <algorithm>
#include <chrono>
#include <cmath>

#include "subdyadic/corpus.hpp"
#include "subdyadic/experiment.hpp"
#include "subdyadic/maximal.hpp"
#include "subdyadic/squarefn.hpp"
#include "subdyadic/window.hpp"

namespace subdyadic {

namespace {

using Clock = std::chrono::steady_clock;

// Exhaustive ball sums at evenly spaced points, about `samples` of them;
// returns how many were visited so the caller can scale the time up.
std::size_t naive_hl_at(const Weight& w, std::size_t samples, double& sink) {
  const GridSpec& spec = w.spec();
  const auto radii = radius_grid(spec);
  const int n = spec.n();
  std::size_t visited = 0;
  const std::size_t stride = std::max<std::size_t>(1, spec.size() / samples);
  for (std::size_t x = 0; x < spec.size(); x += stride) {
    const auto [x0, x1] = spec.axis_indices(x);
    double best = 0.0;
    for (double r : radii) {
      double sum = 0.0;
      std::size_t count = 0;
      const int reach = std::min(n / 2, static_cast<int>(std::ceil(r / spec.cell())));
      for (int o0 = -reach; o0 <= reach; ++o0)
        for (int o1 = spec.dim() == 2 ? -reach : 0; o1 <= (spec.dim() == 2 ? reach : 0); ++o1) {
          if (!Window::contains(spec, r, o0, o1)) continue;
          sum += w[spec.dim() == 1 ? spec.flat(spec.wrap(x0 + o0)) : spec.flat(spec.wrap(x0 + o0), spec.wrap(x1 + o1))];
          ++count;
        }
      best = std::max(best, sum / static_cast<double>(count));
    }
    sink += best;
    ++visited;
  }
  return visited;
}

}  // namespace

std::vector<std::string> bench_ops() {
  return {"fft", "g", "gstar", "s_phi", "hl_maximal", "hl_maximal_naive", "subdyadic_maximal", "nikodym_maximal"};
}

BenchReport bench(const std::string& op, const std::vector<int>& sizes, int dim, int repeats) {
  const auto ops = bench_ops();
  if (std::find(ops.begin(), ops.end(), op) == ops.end()) throw ConfigError("unknown bench operation '" + op + "'");
  if (dim != 1 && dim != 2) throw ConfigError("bench: dim must be 1 or 2");
  if (op == "nikodym_maximal" && dim != 2) throw ConfigError("bench: nikodym_maximal needs dim = 2");
  if (sizes.empty()) throw ConfigError("bench: empty size list");
  BenchReport rep;
  rep.op = op;
  rep.dim = dim;
  rep.sizes = sizes;
  const double alpha = 2.0;
  const AnalyzingFunction phi(alpha);
  for (int n : sizes) {
    // Fixed cell: the box grows with N so the scale count grows like log N.
    const GridSpec spec(dim, n, n / 4.0);
    CorpusOptions opt;
    opt.dim = dim;
    opt.band = {2.0 * spec.freq_step(), std::min(spec.nyquist() / 2.0, 4.0)};
    opt.band = support_band(alpha, opt.band);
    const TestCorpus corpus = make_corpus(opt);
    const GridFunction f = corpus.sample_functions(spec).back();
    const Weight w = corpus.sample_weights(spec).back();
    const ScaleGrid grid = make_scale_grid(phi, alpha, opt.band.lo, opt.band.hi, 8, true);
    const std::size_t samples = std::min<std::size_t>(spec.size(), 64);
    double best = INFINITY, sink = 0.0, scale_up = 1.0;
    for (int rpt = 0; rpt < std::max(1, repeats); ++rpt) {
      const auto t0 = Clock::now();
      if (op == "fft") {
        std::vector<cplx> data(f.values().begin(), f.values().end());
        fft_inplace(spec, data, false);
        sink += std::abs(data[1]);
      } else if (op == "g") {
        sink += g_alpha_beta(f, alpha, 0.5, phi, grid)[0];
      } else if (op == "gstar") {
        sink += g_star(f, alpha, 0.0, 2.0, phi, grid)[0];
      } else if (op == "s_phi") {
        const AnalyzingFunction phi0(0.0);
        sink += s_phi(f, phi0, make_scale_grid(phi0, 0.0, opt.band.lo, opt.band.hi, 8, false))[0];
      } else if (op == "hl_maximal") {
        sink += hl_maximal(w)[0];
      } else if (op == "hl_maximal_naive") {
        scale_up = static_cast<double>(spec.size()) / static_cast<double>(naive_hl_at(w, samples, sink));
      } else if (op == "subdyadic_maximal") {
        sink += subdyadic_maximal(w, alpha, 0.25)[0];
      } else {
        sink += nikodym_maximal(w, 0.5, 0.25)[0];
      }
      const double secs = std::chrono::duration<double>(Clock::now() - t0).count() * scale_up;
      best = std::min(best, secs);
    }
    if (!std::isfinite(sink)) best = INFINITY;
    rep.seconds.push_back(best);
  }
  if (sizes.size() >= 2) {
    // least squares slope of log t against log(M log M), M = N^d
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double k = static_cast<double>(sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      const double m = std::pow(static_cast<double>(sizes[i]), dim);
      const double x = std::log(m * std::log(m)), y = std::log(std::max(rep.seconds[i], 1e-9));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    rep.fitted_exponent = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  }
  return rep;
}

}  // namespace subdyadic
