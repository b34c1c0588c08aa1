#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "subdyadic/experiment.hpp"
#include "subdyadic/squarefn.hpp"
#include "subdyadic/verify.hpp"

namespace subdyadic {

namespace {

double get(const ParamList& p, const std::string& key) {
  for (const auto& [k, v] : p)
    if (k == key) return v;
  throw Error("missing parameter '" + key + "'");
}

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

RefinementPlan plan_for(const RunContext& c, double alpha) {
  RefinementPlan p = refinement_plan(c.dim, c.length > 0.0 ? c.length : default_length(c.dim, alpha), c.seed);
  if (!c.sizes.empty()) {
    p.sizes = c.sizes;
    p.lengths.assign(p.sizes.size(), p.lengths.front());
  }
  return p;
}

RefinementPlan growing_for(const RunContext& c, double cell) {
  RefinementPlan p = growing_plan(c.dim, cell, c.seed);
  if (!c.sizes.empty()) {
    p.sizes = c.sizes;
    p.lengths.clear();
    for (int n : p.sizes) p.lengths.push_back(n * cell);
  }
  return p;
}

Outcome from(InequalityReport r, const std::string& tag = "") {
  if (!tag.empty()) r.tag = tag;
  Outcome o;
  o.name = r.name;
  o.tag = r.tag;
  o.params = r.params;
  o.constant = r.empirical_constant;
  o.verdict = r.verdict;
  o.json = r.to_json();
  o.sizes = r.sizes;
  o.trend = r.trend;
  return o;
}

std::vector<Outcome> from(const std::vector<InequalityReport>& rs) {
  std::vector<Outcome> out;
  for (const auto& r : rs) out.push_back(from(r));
  return out;
}

Outcome from_scan(const OpnormReport& r, const std::string& name, const std::string& tag, ParamList params) {
  Outcome o;
  o.name = name;
  o.tag = tag;
  o.params = std::move(params);
  o.constant = 0.0;
  for (double v : r.norms) o.constant = std::max(o.constant, v);
  o.verdict = r.verdict;
  o.fitted_exponent = r.fitted_exponent;
  nlohmann::ordered_json j;
  j["name"] = name;
  j["tag"] = tag;
  j["scan"] = nlohmann::ordered_json::parse(r.to_json());
  o.json = j.dump(2);
  o.sizes = r.sizes;
  o.trend = r.norms;
  return o;
}

// Per-scale energy of the first corpus member on the coarsest grid.
void attach_energy(Outcome& o, const RefinementPlan& plan, double alpha, double beta) {
  CorpusOptions opt;
  opt.dim = plan.dim;
  opt.seed = plan.seed;
  opt.band = test_band(plan, alpha, true);
  const GridSpec coarse = plan.grids().front();
  const auto fs = make_corpus(opt).sample_functions(coarse);
  if (fs.empty()) return;
  const AnalyzingFunction phi(alpha);
  const ScaleGrid grid = make_scale_grid(phi, alpha, opt.band.lo, opt.band.hi, plan.per_octave, true);
  std::stringstream ss;
  write_energy_profile(ss, fs.front(), beta, phi, grid);
  std::string line;
  std::getline(ss, line);  // header
  while (std::getline(ss, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    o.energy_t.push_back(std::stod(line.substr(0, comma)));
    o.energy.push_back(std::stod(line.substr(comma + 1)));
  }
}

std::vector<Outcome> with_energy(InequalityReport r, const RefinementPlan& plan, double alpha, double beta) {
  Outcome o = from(std::move(r));
  attach_energy(o, plan, alpha, beta);
  return {o};
}

using Check = std::function<std::string(const ParamList&, const RunContext&)>;

std::string none(const ParamList&, const RunContext&) { return ""; }

Check need_lambda_above_one() {
  return [](const ParamList& p, const RunContext&) { return get(p, "lambda") > 1.0 ? "" : "lambda > 1"; };
}

std::string d1_only(const RunContext& c) { return c.dim == 1 ? "" : "d = 1"; }

std::vector<RegistryEntry> build() {
  std::vector<RegistryEntry> r;

  r.push_back({"thm1", "pointwise", "g_{alpha,beta}(T_m f) <= C g*_{alpha,0,2 sigma/d}(f) pointwise",
               {{"alpha", 2.0}, {"beta", 1.0}, {"sigma", 1.0}},
               [](const ParamList& p, const RunContext& c) {
                 return get(p, "sigma") > c.dim / 2.0 ? "" : "sigma > d/2";
               },
               [](const ParamList& p, const RunContext& c) {
                 const double a = get(p, "alpha"), b = get(p, "beta");
                 const auto plan = plan_for(c, a);
                 return with_energy(test_pointwise_thm1(a, b, get(p, "sigma"), plan), plan, a, b);
               }});
  r.push_back({"thm1_identity", "pointwise", "the pointwise estimate with m = 1; constant at most 2^{d lambda/2}",
               {{"alpha", 2.0}, {"sigma", 1.0}},
               [](const ParamList& p, const RunContext& c) {
                 return get(p, "sigma") > c.dim / 2.0 ? "" : "sigma > d/2";
               },
               [](const ParamList& p, const RunContext& c) {
                 const double a = get(p, "alpha");
                 const auto plan = plan_for(c, a);
                 return with_energy(test_pointwise_identity(a, get(p, "sigma"), plan), plan, a, 0.0);
               }});
  r.push_back({"thm2", "ReverseThm", "int |f|^2 w <= C int g_{alpha,beta}(f)^2 M_{alpha,beta} M^4 w",
               {{"alpha", 2.0}, {"beta", 1.0}}, none, [](const ParamList& p, const RunContext& c) {
                 const double a = get(p, "alpha"), b = get(p, "beta");
                 const auto plan = plan_for(c, a);
                 return with_energy(test_reverse_thm2(a, b, plan), plan, a, b);
               }});
  r.push_back({"thm3", "ForwardThm", "int g*_{alpha,0,lambda}(f)^2 w <= C int |f|^2 M^2 w",
               {{"alpha", 2.0}, {"lambda", 2.0}}, need_lambda_above_one(),
               [](const ParamList& p, const RunContext& c) {
                 const double a = get(p, "alpha");
                 const auto plan = plan_for(c, a);
                 return with_energy(test_forward_thm3(a, get(p, "lambda"), plan), plan, a, 0.0);
               }});
  r.push_back({"cor4", "mainweight", "int |T_m f|^2 w <= C int |f|^2 M^2 M_{alpha,beta} M^4 w",
               {{"alpha", 2.0}, {"beta", 1.0}}, none, [](const ParamList& p, const RunContext& c) {
                 const double a = get(p, "alpha"), b = get(p, "beta");
                 const auto plan = plan_for(c, a);
                 return with_energy(test_corollary4(a, b, plan), plan, a, b);
               }});
  r.push_back({"decoupling", "decoupling", "pointwise decoupling over the lattice partition",
               {{"alpha", 2.0}, {"beta", 0.0}, {"lambda", 2.0}}, need_lambda_above_one(),
               [](const ParamList& p, const RunContext& c) {
                 const double a = get(p, "alpha"), b = get(p, "beta");
                 const auto plan = plan_for(c, a);
                 return with_energy(test_decoupling(a, b, get(p, "lambda"), plan), plan, a, b);
               }});
  r.push_back({"recoupling", "recoupling", "pointwise recoupling over the lattice partition",
               {{"alpha", 2.0}, {"beta", 0.0}, {"lambda", 2.0}}, need_lambda_above_one(),
               [](const ParamList& p, const RunContext& c) {
                 const double a = get(p, "alpha"), b = get(p, "beta");
                 const auto plan = plan_for(c, a);
                 return with_energy(test_recoupling(a, b, get(p, "lambda"), plan), plan, a, b);
               }});
  r.push_back({"bessel", "bessel", "sum_l |f * nu_{k,l}|^2 <= C |f|^2 * |nu_k|",
               {{"k", 1.0}, {"alpha", 0.0}},
               [](const ParamList& p, const RunContext&) {
                 return is_integer(get(p, "k")) && get(p, "k") >= 0.0 ? "" : "k a non-negative integer";
               },
               [](const ParamList& p, const RunContext& c) {
                 const double a = get(p, "alpha");
                 return std::vector<Outcome>{
                     from(test_bessel_lemma(static_cast<int>(get(p, "k")), a, plan_for(c, 0.0)))};
               }});
  r.push_back({"averaging", "balls", "int f h <= C R^d int (average of f)(sup of h) over balls of radius 1/R",
               {{"R", 4.0}},
               [](const ParamList& p, const RunContext&) {
                 return is_integer(get(p, "R")) && get(p, "R") >= 1.0 ? "" : "R a positive integer (cells)";
               },
               [](const ParamList& p, const RunContext& c) {
                 return std::vector<Outcome>{
                     from(test_averaging_lemma(static_cast<int>(get(p, "R")), plan_for(c, 0.0)))};
               }});
  r.push_back({"appendix", "ForwardCont", "classical square function s_phi, forward and reverse weighted bounds", {},
               none, [](const ParamList&, const RunContext& c) { return from(test_classical_appendix(plan_for(c, 0.0))); }});
  r.push_back({"osc_pointwise", "pointwiseosc", "oscillatory kernel K_{a,b}: pointwise estimate",
               {{"a", 2.0}, {"b", 1.0}, {"lambda", 2.0}},
               [](const ParamList& p, const RunContext& c) -> std::string {
                 if (!d1_only(c).empty()) return d1_only(c);
                 if (!(get(p, "a") > 0.0) || get(p, "a") == 1.0) return "a > 0, a != 1";
                 return get(p, "lambda") > 0.0 ? "" : "lambda > 0";
               },
               [](const ParamList& p, const RunContext& c) {
                 return std::vector<Outcome>{from(
                     test_oscillatory_pointwise(get(p, "a"), get(p, "b"), get(p, "lambda"), plan_for(c, 0.0)))};
               }});
  r.push_back({"osc_weighted", "mainosc", "oscillatory kernel K_{a,b}: weighted estimate",
               {{"a", 2.0}, {"b", 1.0}},
               [](const ParamList& p, const RunContext& c) -> std::string {
                 if (!d1_only(c).empty()) return d1_only(c);
                 return get(p, "a") > 0.0 && get(p, "a") != 1.0 ? "" : "a > 0, a != 1";
               },
               [](const ParamList& p, const RunContext& c) {
                 return std::vector<Outcome>{
                     from(test_oscillatory_weighted(get(p, "a"), get(p, "b"), plan_for(c, 0.0)))};
               }});
  r.push_back({"dispersive", "SchrodingerEst",
               "local energy of e^{is|D|^alpha} f against the global maximal operator, with its variants",
               {{"alpha", 2.0}, {"beta", 0.25}},
               [](const ParamList& p, const RunContext& c) -> std::string {
                 const double b = get(p, "beta");
                 if (!(b >= 0.0 && 2.0 * b < c.dim)) return "0 <= 2 beta < d";
                 for (double s : c.s_grid)
                   if (!(s > 0.0 && s <= 1.0)) return "0 < s <= 1";
                 return "";
               },
               [](const ParamList& p, const RunContext& c) {
                 const double a = get(p, "alpha");
                 const std::vector<double> s = c.s_grid.empty() ? std::vector<double>{0.25, 0.5, 1.0} : c.s_grid;
                 return from(test_dispersive(a, get(p, "beta"), s, plan_for(c, a)));
               }});
  r.push_back({"power_weight", "special", "sup of M_{alpha,gamma/2} |x|^{-gamma}, uniform in alpha",
               {{"alpha", 1.0}, {"gamma", 0.5}},
               [](const ParamList& p, const RunContext& c) {
                 const double g = get(p, "gamma");
                 return g >= 0.0 && g < c.dim ? "" : "0 <= gamma < d";
               },
               [](const ParamList& p, const RunContext& c) {
                 const double a = get(p, "alpha");
                 return std::vector<Outcome>{from(test_power_weight(a, get(p, "gamma"), plan_for(c, a)))};
               }});
  r.push_back({"strichartz", "DualityArgument",
               "||e^{is|D|^alpha} f||_q <= C ||f||_{H^beta-dot}, beta = d(1/2 - 1/q), on growing boxes",
               {{"alpha", 2.0}, {"q", 4.0}},
               [](const ParamList& p, const RunContext&) {
                 const double q = get(p, "q");
                 return q >= 2.0 && std::isfinite(q) ? "" : "2 <= q < infinity";
               },
               [](const ParamList& p, const RunContext& c) {
                 return std::vector<Outcome>{
                     from(test_strichartz_recovery(get(p, "alpha"), get(p, "q"), growing_for(c, 0.5)), "DualityArgument")};
               }});
  r.push_back({"g_reverse", "gbounds", "||f||_q <= C ||g_{alpha,beta}(f)||_p; beta = nan picks the boundary",
               {{"alpha", 2.0}, {"beta", NAN}, {"p", 2.0}, {"q", 2.0}},
               [](const ParamList& p, const RunContext&) {
                 const double pp = get(p, "p"), q = get(p, "q");
                 return 2.0 <= pp && pp <= q && std::isfinite(q) ? "" : "2 <= p <= q < infinity";
               },
               [](const ParamList& p, const RunContext& c) {
                 const double a = get(p, "alpha");
                 const auto plan = plan_for(c, a);
                 InequalityReport rep = test_g_reverse_lp(a, get(p, "beta"), get(p, "p"), get(p, "q"), plan);
                 const double b = rep.param("beta");
                 return with_energy(std::move(rep), plan, a, b);
               }});
  r.push_back({"region_scan", "MaxFunctionThm",
               "L^p -> L^q norms of M_{alpha,beta} under refinement; beta = nan picks the sharp line",
               {{"alpha", 2.0}, {"beta", NAN}, {"p", 2.0}, {"q", 2.0}},
               [](const ParamList& p, const RunContext&) {
                 const double pp = get(p, "p"), q = get(p, "q");
                 return 1.0 < pp && pp <= q ? "" : "1 < p <= q <= infinity";
               },
               [](const ParamList& p, const RunContext& c) {
                 const double a = get(p, "alpha"), pp = get(p, "p"), q = get(p, "q");
                 double b = get(p, "beta");
                 if (std::isnan(b)) b = sharp_line_beta(c.dim, a, pp, q);
                 ParamList shown = p;
                 shown.emplace_back("beta_used", b);
                 shown.emplace_back("dim", c.dim);
                 return std::vector<Outcome>{
                     from_scan(maximal_region_scan(c.dim, a, b, pp, q), "maximal_region", "MaxFunctionThm", shown)};
               }});
  r.push_back({"miyachi", "MikhlinCondition",
               "L^p norms of |xi|^{-beta} e^{i|xi|^alpha} on packets; bounded iff |1/2 - 1/p| <= beta/alpha",
               {{"alpha", 2.0}, {"beta", 0.5}, {"p", 2.0}},
               [](const ParamList& p, const RunContext& c) -> std::string {
                 if (!d1_only(c).empty()) return d1_only(c);
                 if (!(get(p, "alpha") > 0.0)) return "alpha > 0";
                 return get(p, "p") > 1.0 ? "" : "p > 1";
               },
               [](const ParamList& p, const RunContext&) {
                 return std::vector<Outcome>{from_scan(miyachi_scan(get(p, "alpha"), get(p, "beta"), get(p, "p")),
                                                       "miyachi_scan", "MikhlinCondition", p)};
               }});
  r.push_back({"chains", "NikKak", "pointwise chains between square and maximal functions at every grid point",
               {{"alpha", 2.0}, {"beta", 0.25}, {"lambda", 2.0}},
               [](const ParamList& p, const RunContext& c) -> std::string {
                 const double b = get(p, "beta");
                 if (!(b >= 0.0 && 2.0 * b < c.dim)) return "0 <= 2 beta < d";
                 return get(p, "lambda") > 0.0 ? "" : "lambda > 0";
               },
               [](const ParamList& p, const RunContext& c) {
                 const double a = get(p, "alpha");
                 std::vector<Outcome> out;
                 for (const auto& ch : pointwise_chains(c.dim, a, get(p, "beta"), get(p, "lambda"), plan_for(c, a))) {
                   Outcome o;
                   o.name = ch.name;
                   o.tag = "NikKak";
                   o.params = p;
                   o.params.emplace_back("dim", c.dim);
                   o.constant = ch.worst_ratio;
                   o.verdict = ch.violations == 0 ? "stable" : "violated";
                   nlohmann::ordered_json j;
                   j["name"] = ch.name;
                   j["tag"] = o.tag;
                   j["points"] = ch.points;
                   j["violations"] = ch.violations;
                   j["worst_ratio"] = ch.worst_ratio;
                   j["constant"] = ch.constant;
                   j["verdict"] = o.verdict;
                   o.json = j.dump(2);
                   out.push_back(std::move(o));
                 }
                 return out;
               }});
  return r;
}

}  // namespace

const std::vector<RegistryEntry>& registry() {
  static const std::vector<RegistryEntry> r = build();
  return r;
}

const RegistryEntry& find_test(const std::string& name) {
  for (const auto& e : registry())
    if (e.name == name) return e;
  throw ConfigError("unknown test '" + name + "' (see `list`)");
}

}  // namespace subdyadic
