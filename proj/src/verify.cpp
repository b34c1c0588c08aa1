#include "subdyadic/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

#include "json.hpp"
#include "subdyadic/cutoff.hpp"
#include "subdyadic/partition.hpp"
#include "subdyadic/squarefn.hpp"
#include "subdyadic/symbols.hpp"
#include "subdyadic/window.hpp"

namespace subdyadic {

namespace {

using GridEval = std::function<RatioTracker(const GridSpec&)>;
using Params = std::vector<std::pair<std::string, double>>;

InequalityReport refine(const std::string& name, const std::string& tag, Params params, const RefinementPlan& plan,
                        const GridEval& eval, double bound = 0.0) {
  InequalityReport r;
  r.name = name;
  r.tag = tag;
  r.params = std::move(params);
  r.params.emplace_back("dim", plan.dim);
  r.seed = plan.seed;
  r.bound = bound;
  bool violated = false;
  for (const GridSpec& spec : plan.grids()) {
    RatioTracker o = eval(spec);
    r.sizes.push_back(spec.n());
    r.lengths.push_back(spec.length());
    r.trend.push_back(o.constant);
    r.excluded += o.excluded;
    violated = violated || o.violated;
    if (o.constant >= r.empirical_constant) {
      r.empirical_constant = o.constant;
      r.witness = o.witness;
    }
  }
  r.verdict = violated ? "violated" : refinement_verdict(r.trend);
  if (bound > 0.0 && r.empirical_constant > bound) r.verdict = "violated";
  return r;
}

// Integral of a product of nonnegative fields.
double integral_product(const Weight& a, const Weight& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * a.spec().cell_volume();
}

double integral_square_times(const Weight& g, const Weight& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * g[i] * w[i];
  return s * g.spec().cell_volume();
}

Weight squared(const Weight& g) {
  std::vector<double> v(g.values().begin(), g.values().end());
  for (double& x : v) x *= x;
  return Weight(g.spec(), std::move(v));
}

Weight hl(const Weight& w, int k) { return k == 0 ? w : hl_maximal(w, k); }

double l2(const GridFunction& f) { return lp_norm(f, 2.0); }

AnalyzingFunction analyzing(double alpha) { return AnalyzingFunction(alpha); }

ScaleGrid scales(const AnalyzingFunction& phi, double alpha, const Band& b, const RefinementPlan& plan,
                 bool restrict_region = true) {
  return make_scale_grid(phi, alpha, b.lo, b.hi, plan.per_octave, restrict_region);
}

CorpusOptions corpus_options(const RefinementPlan& plan, const Band& band) {
  CorpusOptions o;
  o.dim = plan.dim;
  o.band = band;
  o.seed = plan.seed;
  return o;
}

TestCorpus corpus_for(const RefinementPlan& plan, const CorpusOptions& opt) {
  TestCorpus c = make_corpus(opt);
  if (!plan.only_function.empty()) std::erase_if(c.functions, [&](const FunctionSpec& f) { return f.label != plan.only_function; });
  if (!plan.only_weight.empty()) std::erase_if(c.weights, [&](const WeightSpec& w) { return w.label != plan.only_weight; });
  return c;
}

std::vector<Weight> weights_for(const TestCorpus& c, const GridSpec& spec) { return c.sample_weights(spec); }

// Circular convolution h^d sum_y a(y) b(x - y) of real fields.
std::vector<double> circular_convolve(const GridSpec& spec, std::span<const double> a, std::span<const double> b) {
  std::vector<cplx> fa(a.begin(), a.end()), fb(b.begin(), b.end());
  fft_inplace(spec, fa, false);
  fft_inplace(spec, fb, false);
  for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
  fft_inplace(spec, fa, true);
  const double scale = spec.cell_volume() * std::sqrt(static_cast<double>(spec.size()));
  std::vector<double> out(fa.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(0.0, fa[i].real() * scale);
  return out;
}

// Multiplier sampled at the lattice frequencies inside the band (zero elsewhere).
std::vector<cplx> band_samples(const GridSpec& spec, const Band& band, const std::function<cplx(const Point&)>& m) {
  std::vector<cplx> out(spec.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    if (band.contains(spec.frequency_norm(i))) out[i] = m(spec.frequency(i));
  return out;
}

void require_support(const Spectrum& s, double alpha, const std::string& label) {
  const auto occupied = spectral_band(s);
  const double tol = 1e-12;
  for (double rho : occupied) {
    if (rho == 0.0) throw Error("corpus function '" + label + "' has a zero mode");
    const double v = std::pow(rho, alpha);
    if (v < 1.0 - tol) throw Error("corpus function '" + label + "' violates the support condition");
  }
}

// sup_x g_{alpha,beta}(T f) / g*_{alpha,0,lambda}(f) over the corpus.
RatioTracker pointwise_multiplier(const GridSpec& spec, const TestCorpus& corpus, double alpha, double beta,
                                 double lambda, const RefinementPlan& plan,
                                 const std::function<GridFunction(const GridFunction&)>& apply) {
  RatioTracker o;
  const auto phi = analyzing(alpha);
  const auto grid = scales(phi, alpha, corpus.options.band, plan);
  const auto fs = corpus.sample_functions(spec);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const Weight lhs = g_alpha_beta(apply(fs[i]), alpha, beta, phi, grid);
    const Weight rhs = g_star(fs[i], alpha, 0.0, lambda, phi, grid);
    o.pointwise(spec, lhs.values(), rhs.values(), l2(fs[i]), corpus.functions[i].label, "");
  }
  return o;
}

// int |T f|^2 w / int |f|^2 M^2 Op M^4 w over functions and weights.
RatioTracker weighted_multiplier(const GridSpec& spec, const TestCorpus& corpus,
                                const std::function<GridFunction(const GridFunction&)>& apply,
                                const std::function<Weight(const Weight&)>& control) {
  RatioTracker o;
  const auto fs = corpus.sample_functions(spec);
  const auto ws = weights_for(corpus, spec);
  std::vector<GridFunction> tf;
  for (const auto& f : fs) tf.push_back(apply(f));
  for (std::size_t j = 0; j < ws.size(); ++j) {
    const Weight rhs_w = hl(control(hl(ws[j], 4)), 2);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const double lhs = weighted_l2(tf[i], ws[j]);
      const double rhs = weighted_l2(fs[i], rhs_w);
      o.integral(spec, lhs, rhs, l2(fs[i]) * l2(fs[i]) * std::max(ws[j].max(), 1e-300),
                       corpus.functions[i].label, corpus.weights[j].label);
    }
  }
  return o;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------

void RatioTracker::offer(double ratio, const std::string& f, const std::string& w, const Point& x, int n) {
  // witness.size == 0 until the first ratio arrives
  if (ratio > constant || witness.size == 0) {
    constant = ratio;
    witness = {f, w, x, n};
  }
}

void RatioTracker::pointwise(const GridSpec& s, std::span<const double> lhs, std::span<const double> rhs, double scale,
                             const std::string& f, const std::string& w) {
  const double floor = kFloor * scale;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    if (rhs[i] <= floor) {
      if (rhs[i] == 0.0 && lhs[i] > floor) violated = true;
      ++excluded;
      continue;
    }
    offer(lhs[i] / rhs[i], f, w, s.position(i), s.n());
  }
}

void RatioTracker::integral(const GridSpec& s, double lhs, double rhs, double scale, const std::string& f,
                            const std::string& w) {
  if (rhs <= kFloor * scale) {
    if (rhs == 0.0 && lhs > kFloor * scale) violated = true;
    ++excluded;
    return;
  }
  offer(lhs / rhs, f, w, {0.0, 0.0}, s.n());
}

RefinementPlan replay_plan(const RefinementPlan& plan, const Witness& w) {
  RefinementPlan r = plan;
  r.sizes.clear();
  r.lengths.clear();
  for (std::size_t i = 0; i < plan.sizes.size(); ++i)
    if (plan.sizes[i] == w.size) {
      r.sizes.push_back(plan.sizes[i]);
      r.lengths.push_back(plan.lengths[i]);
    }
  if (r.sizes.empty()) throw Error("replay_plan: the witness grid is not part of the plan");
  r.only_function = w.function;
  r.only_weight = w.weight;
  return r;
}

double InequalityReport::param(const std::string& key) const {
  for (const auto& [k, v] : params)
    if (k == key) return v;
  throw Error("report '" + name + "' has no parameter '" + key + "'");
}

std::string InequalityReport::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["tag"] = tag;
  nlohmann::ordered_json p = nlohmann::ordered_json::object();
  for (const auto& [k, v] : params) p[k] = v;
  j["params"] = p;
  j["empirical_constant"] = empirical_constant;
  j["witness"] = {{"function", witness.function},
                  {"weight", witness.weight},
                  {"point", {witness.point[0], witness.point[1]}},
                  {"size", witness.size}};
  j["sizes"] = sizes;
  j["lengths"] = lengths;
  j["refinement_trend"] = trend;
  j["verdict"] = verdict;
  j["excluded_points"] = excluded;
  j["seed"] = seed;
  if (bound > 0.0) j["bound"] = bound;
  return j.dump(2);
}

std::string InequalityReport::csv_header() { return "name,tag,params,constant,verdict"; }

std::string InequalityReport::csv_row() const {
  std::string ps;
  for (const auto& [k, v] : params) {
    if (!ps.empty()) ps += ';';
    ps += k + "=" + fmt(v);
  }
  return name + "," + tag + "," + ps + "," + fmt(empirical_constant) + "," + verdict;
}

std::string refinement_verdict(const std::vector<double>& c) {
  if (c.empty()) return "stable";
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double v : c) {
    if (!std::isfinite(v)) return "growing";
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi == 0.0) return "stable";
  return lo > 0.0 && hi / lo <= kStableRatio ? "stable" : "growing";
}

std::vector<GridSpec> RefinementPlan::grids() const {
  if (sizes.size() != lengths.size()) throw Error("RefinementPlan: sizes and lengths differ in count");
  std::vector<GridSpec> g;
  for (std::size_t i = 0; i < sizes.size(); ++i) g.emplace_back(dim, sizes[i], lengths[i]);
  return g;
}

RefinementPlan refinement_plan(int dim, double length, std::uint64_t seed) {
  RefinementPlan p;
  p.dim = dim;
  p.seed = seed;
  p.sizes = dim == 1 ? std::vector<int>{128, 256, 512} : std::vector<int>{32, 64, 128};
  p.lengths.assign(p.sizes.size(), length);
  return p;
}

RefinementPlan growing_plan(int dim, double cell, std::uint64_t seed) {
  RefinementPlan p = refinement_plan(dim, 1.0, seed);
  for (std::size_t i = 0; i < p.sizes.size(); ++i) p.lengths[i] = p.sizes[i] * cell;
  return p;
}

double default_length(int dim, double alpha) {
  if (dim == 1) return alpha < 0.0 ? 128.0 : 64.0;
  return alpha < 0.0 ? 32.0 : 16.0;
}

Band test_band(const RefinementPlan& plan, double alpha, bool support) {
  const GridSpec coarse = plan.grids().front();
  const double L = coarse.length();
  Band b;
  b.hi = std::min(coarse.nyquist() / 2.0, 4.0);
  b.lo = 2.0 * coarse.freq_step();
  // Largest scale seen is about 1 / lo (alpha < 0) or 2 / lo (alpha = 0);
  // keep its reach inside a quarter of the box.
  if (alpha < 0.0) b.lo = std::max(b.lo, std::pow(L / 4.0, -1.0 / (1.0 - alpha)));
  if (alpha == 0.0) b.lo = std::max(b.lo, 8.0 / L);
  return support ? support_band(alpha, b) : b;
}

Band reverse_band(const RefinementPlan& plan, double alpha) {
  Band b = test_band(plan, alpha, true);
  if (alpha > 0.0) b.lo = std::max(b.lo, 2.0);
  if (alpha < 0.0) b.hi = std::min(b.hi, 0.5);
  if (!(b.lo <= b.hi)) throw Error("reverse_band: the coarsest grid does not reach the covered band");
  return b;
}

// ---------------------------------------------------------------------------

InequalityReport test_pointwise_thm1(double alpha, double beta, double sigma, const RefinementPlan& plan) {
  const int d = plan.dim;
  if (!(sigma > d / 2.0)) throw Error("test_pointwise_thm1: needs sigma > d/2");
  const double lambda = 2.0 * sigma / d;
  const Symbol m = model_symbol(alpha, beta, ModelVariant::homogeneous);
  // Precondition: the multiplier satisfies the Sobolev-type condition on the test band.
  const Band sb = test_band(plan, alpha, true);
  CheckOptions opt;
  opt.dim = d;
  opt.rho_min = sb.lo;
  opt.rho_max = sb.hi;
  opt.max_balls = 64;
  opt.nodes_per_axis = 4;
  // The checker measures smoothness up to d/2 + 1/2.
  const double top = std::min(sigma, default_sigma(d));
  const ConditionReport pre = hormander_sob_check(m, alpha, beta, {0.0, top / 2.0, top}, standard_bumps(d), opt);
  if (!std::isfinite(pre.constant)) throw Error("test_pointwise_thm1: multiplier fails the Sobolev condition");
  const TestCorpus corpus = corpus_for(plan, corpus_options(plan, test_band(plan, alpha, false)));
  const auto phi = analyzing(alpha);
  return refine("thm1_pointwise", "pointwise",
                {{"alpha", alpha}, {"beta", beta}, {"sigma", sigma}, {"lambda", lambda},
                 {"multiplier_constant", pre.constant}, {"kappa_squared", phi.kappa_squared()}},
                plan, [&](const GridSpec& spec) {
                  const auto samples = sample_symbol(m, spec);
                  return pointwise_multiplier(spec, corpus, alpha, beta, lambda, plan,
                                              [&](const GridFunction& f) { return apply_sampled_multiplier(samples, f); });
                });
}

InequalityReport test_pointwise_identity(double alpha, double sigma, const RefinementPlan& plan) {
  const int d = plan.dim;
  if (!(sigma > d / 2.0)) throw Error("test_pointwise_identity: needs sigma > d/2");
  const double lambda = 2.0 * sigma / d;
  const TestCorpus corpus = corpus_for(plan, corpus_options(plan, test_band(plan, alpha, false)));
  return refine("thm1_identity", "pointwise", {{"alpha", alpha}, {"sigma", sigma}, {"lambda", lambda}}, plan,
                [&](const GridSpec& spec) {
                  return pointwise_multiplier(spec, corpus, alpha, 0.0, lambda, plan,
                                              [](const GridFunction& f) { return f; });
                },
                std::pow(2.0, d * lambda / 2.0) * (1.0 + 1e-9));
}

InequalityReport test_reverse_thm2(double alpha, double beta, const RefinementPlan& plan) {
  const TestCorpus corpus = corpus_for(plan, corpus_options(plan, reverse_band(plan, alpha)));
  const auto phi = analyzing(alpha);
  return refine("thm2_reverse", "ReverseThm", {{"alpha", alpha}, {"beta", beta}}, plan, [&](const GridSpec& spec) {
    RatioTracker o;
    const auto grid = scales(phi, alpha, corpus.options.band, plan);
    const auto fs = corpus.sample_functions(spec);
    const auto ws = weights_for(corpus, spec);
    std::vector<Weight> g;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const Spectrum s = forward_transform(fs[i]);
      require_support(s, alpha, corpus.functions[i].label);
      g.push_back(g_alpha_beta(s, alpha, beta, phi, grid));
    }
    for (std::size_t j = 0; j < ws.size(); ++j) {
      const Weight control = subdyadic_maximal(hl(ws[j], 4), alpha, beta);
      for (std::size_t i = 0; i < fs.size(); ++i)
        o.integral(spec, weighted_l2(fs[i], ws[j]), integral_square_times(g[i], control),
                         l2(fs[i]) * l2(fs[i]) * ws[j].max(), corpus.functions[i].label, corpus.weights[j].label);
    }
    return o;
  });
}

InequalityReport test_forward_thm3(double alpha, double lambda, const RefinementPlan& plan) {
  if (!(lambda > 1.0)) throw Error("test_forward_thm3: needs lambda > 1");
  const TestCorpus corpus = corpus_for(plan, corpus_options(plan, test_band(plan, alpha, false)));
  const auto phi = analyzing(alpha);
  return refine("thm3_forward", "ForwardThm", {{"alpha", alpha}, {"lambda", lambda}}, plan,
                [&](const GridSpec& spec) {
                  RatioTracker o;
                  const auto grid = scales(phi, alpha, corpus.options.band, plan);
                  const auto fs = corpus.sample_functions(spec);
                  const auto ws = weights_for(corpus, spec);
                  std::vector<Weight> gs;
                  for (const auto& f : fs) gs.push_back(g_star(f, alpha, 0.0, lambda, phi, grid));
                  for (std::size_t j = 0; j < ws.size(); ++j) {
                    const Weight control = hl(ws[j], 2);
                    for (std::size_t i = 0; i < fs.size(); ++i)
                      o.integral(spec, integral_square_times(gs[i], ws[j]), weighted_l2(fs[i], control),
                                       l2(fs[i]) * l2(fs[i]) * ws[j].max(), corpus.functions[i].label,
                                       corpus.weights[j].label);
                  }
                  return o;
                });
}

InequalityReport test_corollary4(double alpha, double beta, const RefinementPlan& plan) {
  const TestCorpus corpus = corpus_for(plan, corpus_options(plan, test_band(plan, alpha, true)));
  const Symbol m = model_symbol(alpha, beta, ModelVariant::homogeneous);
  return refine("cor4_weighted", "mainweight", {{"alpha", alpha}, {"beta", beta}}, plan, [&](const GridSpec& spec) {
    const auto samples = sample_symbol(m, spec);
    return weighted_multiplier(
        spec, corpus, [&](const GridFunction& f) { return apply_sampled_multiplier(samples, f); },
        [&](const Weight& w) { return subdyadic_maximal(w, alpha, beta); });
  });
}

namespace {

struct Pieces {
  std::vector<GridFunction> parts;
  GridFunction sum;
};

Pieces decompose(const GridFunction& f, const std::vector<PartitionElement>& elems) {
  Pieces p{{}, GridFunction::zeros(f.spec())};
  for (const auto& e : elems) {
    GridFunction piece = project(f, e);
    if (l2(piece) <= kFloor * l2(f)) continue;
    p.sum = p.sum + piece;
    p.parts.push_back(std::move(piece));
  }
  return p;
}

InequalityReport coupling(bool decouple, double alpha, double beta, double lambda, const RefinementPlan& plan) {
  if (!(lambda > 1.0)) throw Error("coupling tests need lambda > 1");
  const TestCorpus corpus = corpus_for(plan, corpus_options(plan, test_band(plan, alpha, true)));
  const auto phi = analyzing(alpha);
  const char* name = decouple ? "decoupling" : "recoupling";
  return refine(name, name, {{"alpha", alpha}, {"beta", beta}, {"lambda", lambda}}, plan,
                [&](const GridSpec& spec) {
                  RatioTracker o;
                  const Band& b = corpus.options.band;
                  const auto elems = build_partition(spec, alpha, b.lo, b.hi);
                  const auto grid = scales(phi, alpha, b, plan);
                  const auto fs = corpus.sample_functions(spec);
                  for (std::size_t i = 0; i < fs.size(); ++i) {
                    const Pieces p = decompose(fs[i], elems);
                    std::vector<double> sum_sq(spec.size(), 0.0);
                    for (const auto& part : p.parts) {
                      const Weight gs = g_star(part, alpha, beta, lambda, phi, grid);
                      for (std::size_t x = 0; x < spec.size(); ++x) sum_sq[x] += gs[x] * gs[x];
                    }
                    const Weight whole = decouple ? squared(g_alpha_beta(p.sum, alpha, beta, phi, grid))
                                                  : squared(g_star(p.sum, alpha, beta, lambda, phi, grid));
                    const double scale = l2(fs[i]) * l2(fs[i]);
                    if (decouple)
                      o.pointwise(spec, whole.values(), sum_sq, scale, corpus.functions[i].label, "");
                    else
                      o.pointwise(spec, sum_sq, whole.values(), scale, corpus.functions[i].label, "");
                  }
                  return o;
                });
}

}  // namespace

InequalityReport test_decoupling(double alpha, double beta, double lambda, const RefinementPlan& plan) {
  return coupling(true, alpha, beta, lambda, plan);
}

InequalityReport test_recoupling(double alpha, double beta, double lambda, const RefinementPlan& plan) {
  return coupling(false, alpha, beta, lambda, plan);
}

InequalityReport test_bessel_lemma(int k, double alpha, const RefinementPlan& plan) {
  const double cell = std::exp2((1.0 - alpha) * k);
  const TestCorpus corpus = corpus_for(plan, corpus_options(plan, test_band(plan, 0.0, false)));
  const int d = plan.dim;
  return refine("bessel_lemma", "bessel", {{"k", static_cast<double>(k)}, {"alpha", alpha}, {"cell", cell}}, plan,
                [&](const GridSpec& spec) {
                  if (cutoff::kLatticeBumpHalfWidth * cell > spec.nyquist())
                    throw Error("test_bessel_lemma: lattice cell exceeds the grid's frequencies");
                  RatioTracker o;
                  auto nu_hat = [&](const Point& xi, int l0, int l1) {
                    double v = cutoff::lattice_bump(xi[0] / cell - l0);
                    if (d == 2) v *= cutoff::lattice_bump(xi[1] / cell - l1);
                    return v;
                  };
                  // |nu_k| on the grid: nu_k(x) = L^{-d} sum_xi nu_hat(xi) e^{i xi x}.
                  Spectrum ns{spec, std::vector<cplx>(spec.size())};
                  for (std::size_t i = 0; i < spec.size(); ++i) ns.coeffs[i] = nu_hat(spec.frequency(i), 0, 0);
                  const GridFunction nu = inverse_transform(ns);
                  const double to_kernel = std::sqrt(static_cast<double>(spec.size())) / spec.volume();
                  std::vector<double> abs_nu(spec.size());
                  for (std::size_t i = 0; i < spec.size(); ++i) abs_nu[i] = std::abs(nu[i]) * to_kernel;

                  const double hi = corpus.options.band.hi;
                  const int lmax = static_cast<int>(std::ceil(hi / cell + cutoff::kLatticeBumpHalfWidth));
                  const auto fs = corpus.sample_functions(spec);
                  for (std::size_t i = 0; i < fs.size(); ++i) {
                    const Spectrum fh = forward_transform(fs[i]);
                    std::vector<double> lhs(spec.size(), 0.0);
                    for (int l0 = -lmax; l0 <= lmax; ++l0)
                      for (int l1 = d == 2 ? -lmax : 0; l1 <= (d == 2 ? lmax : 0); ++l1) {
                        std::vector<cplx> mult(spec.size());
                        bool any = false;
                        for (std::size_t q = 0; q < spec.size(); ++q) {
                          mult[q] = nu_hat(spec.frequency(q), l0, l1);
                          any = any || (mult[q] != 0.0 && fh.coeffs[q] != 0.0);
                        }
                        if (!any) continue;
                        const GridFunction part = apply_sampled_multiplier(mult, fh);
                        for (std::size_t x = 0; x < spec.size(); ++x) lhs[x] += std::norm(part[x]);
                      }
                    std::vector<double> f2(spec.size());
                    for (std::size_t x = 0; x < spec.size(); ++x) f2[x] = std::norm(fs[i][x]);
                    const auto rhs = circular_convolve(spec, f2, abs_nu);
                    o.pointwise(spec, lhs, rhs, l2(fs[i]) * l2(fs[i]), corpus.functions[i].label, "");
                  }
                  return o;
                });
}

InequalityReport test_averaging_lemma(int radius_cells, const RefinementPlan& plan) {
  if (radius_cells < 1) throw Error("test_averaging_lemma: radius must be at least one cell");
  const TestCorpus corpus = corpus_for(plan, corpus_options(plan, test_band(plan, 0.0, false)));
  const int d = plan.dim;
  return refine("averaging_lemma", "balls", {{"radius_cells", static_cast<double>(radius_cells)}}, plan,
                [&](const GridSpec& spec) {
                  RatioTracker o;
                  std::vector<Weight> ws = weights_for(corpus, spec);
                  std::vector<std::string> labels;
                  for (const auto& w : corpus.weights) labels.push_back(w.label);
                  const auto fs = corpus.sample_functions(spec);
                  for (std::size_t i = 0; i < fs.size(); ++i) {
                    ws.push_back(Weight::modulus(fs[i]));
                    labels.push_back("|" + corpus.functions[i].label + "|");
                  }
                  const double rho = radius_cells * spec.cell();
                  const Window win(spec, rho);
                  for (std::size_t a = 0; a < ws.size(); ++a) {
                    auto sums = window_sum(spec, ws[a].values(), win);
                    for (double& v : sums) v *= spec.cell_volume();
                    for (std::size_t b = 0; b < ws.size(); ++b) {
                      const auto sup = window_max(spec, ws[b].values(), win);
                      double rhs = 0.0;
                      for (std::size_t x = 0; x < spec.size(); ++x) rhs += sums[x] * sup[x];
                      rhs *= spec.cell_volume() * std::pow(rho, -d);
                      const double lhs = integral_product(ws[a], ws[b]);
                      o.integral(spec, lhs, rhs, integral(ws[a]) * ws[b].max(), labels[a], labels[b]);
                    }
                  }
                  return o;
                },
                1.5 * std::pow(2.0, d));
}

std::vector<InequalityReport> test_classical_appendix(const RefinementPlan& plan) {
  const TestCorpus corpus = corpus_for(plan, corpus_options(plan, test_band(plan, 0.0, false)));
  const auto phi = analyzing(0.0);
  auto run = [&](bool forward) {
    return refine(forward ? "appendix_forward" : "appendix_reverse", forward ? "ForwardCont" : "ReverseCont", {},
                  plan, [&](const GridSpec& spec) {
                    RatioTracker o;
                    const auto grid = scales(phi, 0.0, corpus.options.band, plan, false);
                    const auto fs = corpus.sample_functions(spec);
                    const auto ws = weights_for(corpus, spec);
                    std::vector<Weight> s;
                    for (const auto& f : fs) s.push_back(s_phi(f, phi, grid));
                    for (std::size_t j = 0; j < ws.size(); ++j) {
                      const Weight control = hl(ws[j], forward ? 1 : 3);
                      for (std::size_t i = 0; i < fs.size(); ++i) {
                        const double scale = l2(fs[i]) * l2(fs[i]) * ws[j].max();
                        if (forward)
                          o.integral(spec, integral_square_times(s[i], ws[j]), weighted_l2(fs[i], control),
                                           scale, corpus.functions[i].label, corpus.weights[j].label);
                        else
                          o.integral(spec, weighted_l2(fs[i], ws[j]), integral_square_times(s[i], control),
                                           scale, corpus.functions[i].label, corpus.weights[j].label);
                      }
                    }
                    return o;
                  });
  };
  return {run(true), run(false)};
}

// ---------------------------------------------------------------------------

namespace {

struct KernelSetup {
  double length;
  int n;
};

// Box for the kernel samples: the window must leave the transform
// unchanged to 1e-6 on the band used by the tests.
KernelSetup kernel_box(double a) { return a > 1.0 ? KernelSetup{64.0, 4096} : KernelSetup{2048.0, 32768}; }

}  // namespace

InequalityReport test_oscillatory_pointwise(double a, double b, double lambda, const RefinementPlan& plan) {
  if (plan.dim != 1) throw Error("oscillatory tests run in d = 1");
  if (!(lambda > 0.0)) throw Error("test_oscillatory_pointwise: needs lambda > 0");
  const OscKernelParams kp{a, b, 1};
  kp.validate();
  const KernelSetup box = kernel_box(a);
  const OscillatoryKernel kernel(kp, GridSpec(1, box.n, box.length));
  const double alpha = kp.alpha(), beta = kp.beta();
  const TestCorpus corpus = corpus_for(plan, corpus_options(plan, test_band(plan, alpha, false)));
  return refine("oscillatory_pointwise", "pointwiseosc",
                {{"a", a}, {"b", b}, {"alpha", alpha}, {"beta", beta}, {"lambda", lambda}}, plan,
                [&](const GridSpec& spec) {
                  const auto samples = band_samples(spec, corpus.options.band,
                                                    [&](const Point& xi) { return kernel.transform(xi); });
                  return pointwise_multiplier(spec, corpus, alpha, beta, lambda, plan, [&](const GridFunction& f) {
                    return apply_sampled_multiplier(samples, f);
                  });
                });
}

InequalityReport test_oscillatory_weighted(double a, double b, const RefinementPlan& plan) {
  if (plan.dim != 1) throw Error("oscillatory tests run in d = 1");
  const OscKernelParams kp{a, b, 1};
  kp.validate();
  const KernelSetup box = kernel_box(a);
  const OscillatoryKernel kernel(kp, GridSpec(1, box.n, box.length));
  const double alpha = kp.alpha(), beta = kp.beta();
  const TestCorpus corpus = corpus_for(plan, corpus_options(plan, test_band(plan, alpha, false)));
  return refine("oscillatory_weighted", "mainosc", {{"a", a}, {"b", b}, {"alpha", alpha}, {"beta", beta}}, plan,
                [&](const GridSpec& spec) {
                  const auto samples = band_samples(spec, corpus.options.band,
                                                    [&](const Point& xi) { return kernel.transform(xi); });
                  return weighted_multiplier(
                      spec, corpus, [&](const GridFunction& f) { return apply_sampled_multiplier(samples, f); },
                      [&](const Weight& w) { return subdyadic_maximal(w, alpha, beta); });
                });
}

std::vector<InequalityReport> test_dispersive(double alpha, double beta, const std::vector<double>& s_grid,
                                              const RefinementPlan& plan) {
  const int d = plan.dim;
  if (!(beta >= 0.0 && 2.0 * beta < d)) throw Error("test_dispersive: needs 0 <= 2 beta < d");
  if (s_grid.empty()) throw Error("test_dispersive: empty s grid");
  for (double s : s_grid)
    if (!(s > 0.0 && s <= 1.0)) throw Error("test_dispersive: s values must lie in (0, 1]");
  CorpusOptions opt = corpus_options(plan, test_band(plan, alpha, false));
  opt.chirps = true;
  opt.chirp_alpha = alpha;
  const TestCorpus corpus = corpus_for(plan, opt);
  const Params base{{"alpha", alpha}, {"beta", beta}, {"s_count", static_cast<double>(s_grid.size())},
                    {"s_max", *std::max_element(s_grid.begin(), s_grid.end())}};
  std::vector<InequalityReport> out;

  // Per-s estimate against the s-dependent global operator.
  out.push_back(refine("dispersive", "SchrodingerEst", base, plan, [&](const GridSpec& spec) {
    RatioTracker o;
    const auto fs = corpus.sample_functions(spec);
    const auto ws = weights_for(corpus, spec);
    for (double s : s_grid)
      for (std::size_t j = 0; j < ws.size(); ++j) {
        const Weight control = hl(global_maximal(hl(ws[j], 4), alpha, beta, s), 2);
        for (std::size_t i = 0; i < fs.size(); ++i)
          o.integral(spec, weighted_l2(propagator(fs[i], s, alpha), ws[j]),
                           weighted_l2(fractional_laplacian(fs[i], beta), control),
                           l2(fs[i]) * l2(fs[i]) * ws[j].max(), corpus.functions[i].label, corpus.weights[j].label);
      }
    return o;
  }));

  // sup over s of the left side against the s = 1 operator.
  out.push_back(refine("dispersive_sup", "maximal", base, plan, [&](const GridSpec& spec) {
    RatioTracker o;
    const auto fs = corpus.sample_functions(spec);
    const auto ws = weights_for(corpus, spec);
    for (std::size_t j = 0; j < ws.size(); ++j) {
      const Weight control = hl(global_maximal(hl(ws[j], 4), alpha, beta, 1.0), 2);
      for (std::size_t i = 0; i < fs.size(); ++i) {
        double lhs = 0.0;
        for (double s : s_grid) lhs = std::max(lhs, weighted_l2(propagator(fs[i], s, alpha), ws[j]));
        o.integral(spec, lhs, weighted_l2(fractional_laplacian(fs[i], beta), control),
                         l2(fs[i]) * l2(fs[i]) * ws[j].max(), corpus.functions[i].label, corpus.weights[j].label);
      }
    }
    return o;
  }));

  // Inhomogeneous derivatives with the local operator at scale s^{1/alpha}.
  if (alpha != 0.0)
    out.push_back(refine("dispersive_inhomogeneous", "weightedINH", base, plan, [&](const GridSpec& spec) {
      RatioTracker o;
      const auto fs = corpus.sample_functions(spec);
      const auto ws = weights_for(corpus, spec);
      for (double s : s_grid)
        for (std::size_t j = 0; j < ws.size(); ++j) {
          const Weight control = hl(inhomogeneous_maximal(hl(ws[j], 4), alpha, beta, s), 2);
          for (std::size_t i = 0; i < fs.size(); ++i)
            o.integral(spec, weighted_l2(propagator(fs[i], s, alpha), ws[j]),
                             weighted_l2(bessel_potential(fs[i], beta, std::pow(s, 1.0 / alpha)), control),
                             l2(fs[i]) * l2(fs[i]) * ws[j].max(), corpus.functions[i].label,
                             corpus.weights[j].label);
        }
      return o;
    }));

  // Two-sided model multiplier against the global operator.
  if (alpha != 0.0) {
    const Symbol m = model_symbol(alpha, beta, ModelVariant::two_sided);
    out.push_back(refine("two_sided", "sleepy", base, plan, [&](const GridSpec& spec) {
      const auto samples = sample_symbol(m, spec);
      return weighted_multiplier(
          spec, corpus, [&](const GridFunction& f) { return apply_sampled_multiplier(samples, f); },
          [&](const Weight& w) { return global_maximal(w, alpha, beta, 1.0); });
    }));
  }

  // Power weight |x|^{-2 beta}: the estimate reduces to a Hardy inequality.
  const double gamma = 2.0 * beta;
  Params hp = base;
  hp.emplace_back("gamma", gamma);
  out.push_back(refine("power_weight_hardy", "special", hp, plan, [&](const GridSpec& spec) {
    RatioTracker o;
    const auto fs = corpus.sample_functions(spec);
    const Weight w = power_weight(spec, gamma);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const double rhs = std::pow(sobolev_norm_hom(fs[i], gamma / 2.0), 2.0);
      o.integral(spec, weighted_l2(propagator(fs[i], 1.0, alpha), w), rhs, l2(fs[i]) * l2(fs[i]),
                       corpus.functions[i].label, "power");
    }
    return o;
  }));
  return out;
}

InequalityReport test_power_weight(double alpha, double gamma, const RefinementPlan& plan) {
  const int d = plan.dim;
  if (!(gamma >= 0.0 && gamma < d)) throw Error("test_power_weight: needs 0 <= gamma < d");
  return refine("power_weight_uniformity", "special", {{"alpha", alpha}, {"gamma", gamma}}, plan,
                [&](const GridSpec& spec) {
                  RatioTracker o;
                  const Weight mw = global_maximal(power_weight(spec, gamma), alpha, gamma / 2.0, 1.0);
                  std::size_t at = 0;
                  for (std::size_t i = 0; i < mw.size(); ++i)
                    if (mw[i] > mw[at]) at = i;
                  o.offer(mw[at], "", "power", spec.position(at), spec.n());
                  return o;
                });
}

InequalityReport test_strichartz_recovery(double alpha, double q, const RefinementPlan& plan) {
  if (!(q >= 2.0 && std::isfinite(q))) throw Error("test_strichartz_recovery: needs 2 <= q < infinity");
  const int d = plan.dim;
  const double beta = d * (0.5 - 1.0 / q);
  CorpusOptions opt = corpus_options(plan, test_band(plan, alpha, false));
  opt.chirps = true;
  opt.chirp_alpha = alpha;
  const TestCorpus corpus = corpus_for(plan, opt);
  const std::vector<double> s_grid{0.0, 0.25, 0.5, 1.0};
  return refine("strichartz", "strichartz", {{"alpha", alpha}, {"q", q}, {"beta", beta}}, plan,
                [&](const GridSpec& spec) {
                  RatioTracker o;
                  const auto fs = corpus.sample_functions(spec);
                  for (std::size_t i = 0; i < fs.size(); ++i) {
                    const double rhs = sobolev_norm_hom(fs[i], beta);
                    for (double s : s_grid) {
                      const double lhs = lp_norm(propagator(fs[i], s, alpha), q);
                      o.integral(spec, lhs, rhs, l2(fs[i]), corpus.functions[i].label,
                                       "s=" + fmt(s));
                    }
                  }
                  return o;
                });
}

double g_reverse_boundary(int dim, double alpha, double p, double q) {
  return dim * (alpha * (0.5 - 1.0 / p) + 1.0 / p - 1.0 / q);
}

InequalityReport test_g_reverse_lp(double alpha, double beta, double p, double q, const RefinementPlan& plan) {
  if (!(2.0 <= p && p <= q && std::isfinite(q))) throw Error("test_g_reverse_lp: needs 2 <= p <= q < infinity");
  const int d = plan.dim;
  if (std::isnan(beta)) beta = g_reverse_boundary(d, alpha, p, q);
  const double edge = g_reverse_boundary(d, alpha, p, q);
  const bool admissible = alpha > 0.0 ? beta >= edge - 1e-12 : alpha < 0.0 ? beta <= edge + 1e-12
                                                                            : std::abs(beta - edge) < 1e-12;
  const TestCorpus corpus = corpus_for(plan, corpus_options(plan, reverse_band(plan, alpha)));
  const auto phi = analyzing(alpha);
  return refine("g_reverse_lp", "gbounds",
                {{"alpha", alpha}, {"beta", beta}, {"p", p}, {"q", q}, {"admissible", admissible ? 1.0 : 0.0}}, plan,
                [&](const GridSpec& spec) {
                  RatioTracker o;
                  const auto grid = scales(phi, alpha, corpus.options.band, plan);
                  const auto fs = corpus.sample_functions(spec);
                  for (std::size_t i = 0; i < fs.size(); ++i) {
                    const Weight g = g_alpha_beta(fs[i], alpha, beta, phi, grid);
                    o.integral(spec, lp_norm(fs[i], q), lp_norm(g, p), l2(fs[i]), corpus.functions[i].label,
                                     "");
                  }
                  return o;
                });
}

// ---------------------------------------------------------------------------

double sharp_line_beta(int dim, double alpha, double p, double q) {
  const double iq = std::isinf(q) ? 0.0 : 1.0 / q;
  return alpha * dim * iq / 2.0 + dim / 2.0 * (1.0 / p - iq);
}

OpnormReport maximal_region_scan(int dim, double alpha, double beta, double p, double q, int levels) {
  const CorpusFactory spikes = [](const GridSpec& spec) {
    std::vector<Weight> ws;
    for (int width : {1, 2, 4}) {
      std::vector<double> v(spec.size(), 0.0);
      for (int j = 0; j < width; ++j)
        for (int k = 0; k < (spec.dim() == 2 ? width : 1); ++k) v[spec.flat(j, k)] = 1.0;
      ws.emplace_back(spec, std::move(v));
    }
    ws.push_back(Weight::constant(spec, 1.0));
    return ws;
  };
  const auto boxes = opnorm_boxes(dim, alpha, 0.25, 8.0, levels);
  return empirical_opnorm([=](const Weight& w) { return subdyadic_maximal(w, alpha, beta); }, p, q, spikes, boxes,
                          alpha, beta);
}

OpnormReport miyachi_scan(double alpha, double beta, double p, int levels) {
  if (!(p > 1.0)) throw Error("miyachi_scan: needs p > 1");
  if (!(alpha > 0.0)) throw Error("miyachi_scan: needs alpha > 0");
  OpnormReport rep;
  rep.p = p;
  rep.q = p;
  rep.alpha = alpha;
  rep.beta = beta;
  const Symbol m = model_symbol(alpha, beta, ModelVariant::homogeneous);
  for (int k = 0; k < levels; ++k) {
    // Carrier 4 * 2^k with frequency spread carrier/8. The group velocity
    // varies by about alpha|alpha-1| xi0^{alpha-2} * 3 sigma over the packet;
    // the box holds that spread (translation just wraps).
    const double xi0 = 4.0 * std::exp2(k);
    const double sigma = xi0 / 8.0;
    const double spread = alpha * std::abs(alpha - 1.0) * std::pow(xi0, alpha - 2.0) * 3.0 * sigma + 3.0 / sigma;
    const double L = std::exp2(std::ceil(std::log2(std::max(512.0, 4.0 * spread))));
    const Band band{xi0 - 6.0 * sigma, xi0 + 6.0 * sigma};
    const int n = 1 << static_cast<int>(std::ceil(std::log2(2.0 * band.hi * L / kPi)));
    const GridSpec spec(1, std::max(n, 8), L);
    // A packet spreads under the multiplier (worst for p < 2); its
    // pre-dispersed twin refocuses (worst for p > 2).
    FunctionSpec packet;
    packet.amplitude = [=](const Point& xi) {
      const double u = (xi[0] - xi0) / sigma;
      return cplx(std::exp(-0.5 * u * u));
    };
    FunctionSpec focus;
    focus.amplitude = [=](const Point& xi) {
      const double rho = std::abs(xi[0]);
      return packet.amplitude(xi) * std::polar(std::pow(rho, beta), -std::pow(rho, alpha));
    };
    const auto samples = sample_symbol(m, spec);
    double best = 0.0;
    for (const auto* f : {&packet, &focus}) {
      const GridFunction g = f->realize(spec, band);
      best = std::max(best, lp_norm(apply_sampled_multiplier(samples, g), p) / lp_norm(g, p));
    }
    rep.sizes.push_back(spec.n());
    rep.norms.push_back(best);
  }
  rep.classify();
  return rep;
}

// ---------------------------------------------------------------------------

std::vector<ChainReport> pointwise_chains(int dim, double alpha, double beta, double lambda,
                                          const RefinementPlan& plan) {
  if (plan.dim != dim) throw Error("pointwise_chains: plan dimension mismatch");
  const TestCorpus corpus = corpus_for(plan, corpus_options(plan, test_band(plan, alpha, false)));
  const auto phi = analyzing(alpha);
  const RadialProfile profile = RadialProfile::standard();
  ChainReport g_chain{"g_le_gstar"}, nik{"nikodym_le_subdyadic"}, glob{"subdyadic_le_global"},
      reg{"regularised_ge_subdyadic"}, mono{"beta_monotone"};
  const double g_const = std::pow(2.0, dim * lambda / 2.0);
  g_chain.constant = g_const;
  auto check = [](ChainReport& c, double small, double big) {
    ++c.points;
    const double slack = 1e-12 * std::max(std::abs(big), 1e-300) + 1e-300;
    if (small > big + slack) ++c.violations;
    if (big > 0.0) c.worst_ratio = std::max(c.worst_ratio, small / big);
  };
  for (const GridSpec& spec : plan.grids()) {
    const auto grid = scales(phi, alpha, corpus.options.band, plan);
    const auto fs = corpus.sample_functions(spec);
    std::vector<Weight> ws = corpus.sample_weights(spec);
    for (const auto& f : fs) {
      const Weight g = g_alpha_beta(f, alpha, beta, phi, grid);
      const Weight gs = g_star(f, alpha, beta, lambda, phi, grid);
      for (std::size_t x = 0; x < spec.size(); ++x) check(g_chain, g[x], g_const * gs[x]);
      ws.push_back(Weight::modulus(f));
    }
    const double cn = (dim == 2 && alpha != 0.0) ? nikodym_chain_constant(spec, alpha) : 0.0;
    const double cp = regularised_domination_constant(spec, alpha, profile);
    nik.constant = std::max(nik.constant, cn);
    reg.constant = cp;
    for (const auto& w : ws) {
      const Weight sub = subdyadic_maximal(w, alpha, beta);
      if (dim == 2 && alpha != 0.0) {
        const Weight n = nikodym_maximal(w, alpha, beta);
        for (std::size_t x = 0; x < spec.size(); ++x) check(nik, n[x], cn * sub[x]);
      }
      if (beta >= 0.0 && 2.0 * beta < dim) {
        const Weight gl = global_maximal(w, alpha, beta, 1.0);
        for (std::size_t x = 0; x < spec.size(); ++x) check(glob, sub[x], gl[x]);
      }
      const Weight rm = regularised_maximal(w, alpha, beta, profile);
      for (std::size_t x = 0; x < spec.size(); ++x) check(reg, cp * sub[x], rm[x]);
      if (alpha > 0.0) {
        const Weight up = subdyadic_maximal(w, alpha, beta + 0.25);
        for (std::size_t x = 0; x < spec.size(); ++x) check(mono, up[x], sub[x]);
      }
    }
  }
  std::vector<ChainReport> out{g_chain};
  if (dim == 2 && alpha != 0.0) out.push_back(nik);
  if (beta >= 0.0 && 2.0 * beta < dim) out.push_back(glob);
  out.push_back(reg);
  if (alpha > 0.0) out.push_back(mono);
  return out;
}

}  // namespace subdyadic
