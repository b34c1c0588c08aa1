#include <cmath>

#include "doctest.h"
#include "json.hpp"
#include "subdyadic/symbols.hpp"

using namespace subdyadic;

namespace {

GridFunction packet(const GridSpec& s, double center, double width, double freq) {
  return GridFunction::sample(s, [&](const Point& x) {
    double u = x[0] - center;
    u -= s.length() * std::round(u / s.length());
    return std::polar(std::exp(-u * u / (2.0 * width * width)), freq * x[0]);
  });
}

double max_diff(const GridFunction& a, const GridFunction& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// |x|^2-weighted mean position, unwrapped around `guess`.
double centroid(const GridFunction& f, double guess) {
  const GridSpec& s = f.spec();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double x = s.position(i)[0] - guess;
    x -= s.length() * std::round(x / s.length());
    num += (x + guess) * std::norm(f[i]);
    den += std::norm(f[i]);
  }
  return num / den;
}

}  // namespace

TEST_CASE("model symbols: supports, values and variant names") {
  const Symbol h = model_symbol(2.0, 0.5, ModelVariant::homogeneous);
  CHECK_FALSE(h.support({0.5, 0.0}));
  CHECK(h.support({1.0, 0.0}));
  const cplx v = h.eval({3.0, 0.0});
  CHECK(std::abs(v - std::polar(std::pow(3.0, -0.5), 9.0)) < 1e-15);

  const Symbol neg = model_symbol(-1.0, 0.0, ModelVariant::homogeneous);
  CHECK(neg.support({0.5, 0.0}));
  CHECK_FALSE(neg.support({2.0, 0.0}));

  const Symbol t = model_symbol(2.0, 0.5, ModelVariant::two_sided);
  CHECK(t.support({1e-3, 0.0}));
  CHECK_FALSE(t.support({0.0, 0.0}));

  const Symbol in = model_symbol(2.0, 1.0, ModelVariant::inhomogeneous);
  CHECK(in.defined_at_zero);
  CHECK(std::abs(in.eval({0.0, 0.0}) - 1.0) < 1e-15);
  CHECK(std::abs(std::abs(in.eval({0.0, 2.0})) - 1.0 / std::sqrt(5.0)) < 1e-15);
  CHECK_FALSE(model_symbol(-1.0, 1.0, ModelVariant::inhomogeneous).defined_at_zero);

  for (auto v2 : {ModelVariant::homogeneous, ModelVariant::two_sided, ModelVariant::inhomogeneous})
    CHECK(parse_variant(variant_name(v2)) == v2);
  CHECK_THROWS_AS(parse_variant("both"), Error);

  const auto j = nlohmann::json::parse(model_descriptor(2.0, 0.5, ModelVariant::two_sided));
  CHECK(j["variant"] == "two_sided");
  CHECK(j["alpha"].get<double>() == 2.0);
  CHECK(j["beta"].get<double>() == 0.5);
}

TEST_CASE("two-sided condition on the two-sided model") {
  // For m = rho^{-beta} e^{i rho^alpha}, |m| rho^beta = 1 and the weighted
  // first derivative is sqrt(alpha^2 + beta^2 rho^{-2 alpha}) on the outer
  // band, sqrt(beta^2 + alpha^2 rho^{2 alpha}) on the inner one. Both peak at
  // rho = 1 when alpha > 0.
  for (double alpha : {2.0, 0.5}) {
    const double beta = 0.5;
    const Symbol m = model_symbol(alpha, beta, ModelVariant::two_sided);
    CheckOptions outer, inner;
    outer.rho_min = 1.0;
    outer.rho_max = 8.0;
    inner.rho_min = 1.0 / 8.0;
    inner.rho_max = 1.0;
    const TwoSidedReport r = twoside_check(m, alpha, beta, outer, inner);
    const double exact = std::max(1.0, std::hypot(alpha, beta));
    CHECK(r.outer.flagged.empty());
    CHECK(r.inner.flagged.empty());
    CHECK(r.outer.constant == doctest::Approx(exact).epsilon(1e-3));
    // The inner peak is on the boundary, where the stencil leaves the region.
    CHECK(r.inner.constant <= exact * (1.0 + 1e-3));
    CHECK(r.inner.constant == doctest::Approx(exact).epsilon(0.03));
    CHECK(r.constant() == doctest::Approx(exact).epsilon(0.03));
    const auto j = nlohmann::json::parse(r.to_json());
    CHECK(j["inner"]["condition"] == "twoside_inner");
  }
  // alpha < 0 swaps the regions.
  {
    const double alpha = -1.0, beta = 0.0;
    const Symbol m = model_symbol(alpha, beta, ModelVariant::two_sided);
    CheckOptions outer, inner;
    outer.rho_min = 0.25;
    outer.rho_max = 1.0;
    inner.rho_min = 1.0;
    inner.rho_max = 8.0;
    const TwoSidedReport r = twoside_check(m, alpha, beta, outer, inner);
    CHECK(r.outer.flagged.empty());
    CHECK(r.outer.constant == doctest::Approx(1.0).epsilon(1e-3));
    // Inner: rho |d/drho e^{i/rho}| = 1/rho <= 1.
    CHECK(r.inner.constant == doctest::Approx(1.0).epsilon(1e-3));
  }
  const Symbol m = model_symbol(2.0, 0.0, ModelVariant::two_sided);
  CheckOptions bad;
  bad.rho_min = 0.5;
  bad.rho_max = 2.0;
  CHECK_THROWS_AS(twoside_check(m, 2.0, 0.0, bad, bad), Error);
  CHECK_THROWS_AS(twoside_check(m, 0.0, 0.0, bad, bad), Error);
}

TEST_CASE("splitting: pieces add back and sit in their regions") {
  const double alpha = 2.0;
  const Symbol m = model_symbol(alpha, 0.0, ModelVariant::inhomogeneous);
  const SplitSymbol sp = split_multiplier(m, alpha);
  for (double rho = 0.0; rho < 3.0; rho += 0.01) {
    const Point xi{rho, 0.0};
    const cplx sum = sp.low.eval(xi) + sp.high.eval(xi);
    CHECK(std::abs(sum - m.eval(xi)) < 1e-15);
    if (rho * rho <= 1.0) CHECK(sp.high.eval(xi) == cplx(0.0));
    if (rho * rho >= 2.0) CHECK(sp.low.eval(xi) == cplx(0.0));
  }
  CHECK(split_cutoff(0.0, 2.0) == 0.0);
  CHECK(split_cutoff(0.0, -1.0) == 1.0);
  CHECK_THROWS_AS(split_multiplier(m, 0.0), Error);

  // The low piece is smooth and compactly supported, so its kernel is
  // concentrated near the origin. The cutoff is Gevrey rather than analytic,
  // so the tail only drops below 1e-6 once L is in the thousands.
  const GridSpec spec(1, 2048, 2048.0);
  Spectrum s{spec, sample_symbol(sp.low, spec)};
  const GridFunction k = inverse_transform(s);
  double inside = 0.0, outside = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double x = std::abs(spec.min_image(static_cast<int>(i)) * spec.cell());
    (x <= spec.length() / 4.0 ? inside : outside) += std::abs(k[i]);
  }
  CHECK(outside / (inside + outside) < 1e-6);
}

TEST_CASE("oscillatory kernel parameters") {
  OscKernelParams p{2.0, 1.0, 1};
  CHECK(p.alpha() == 2.0);
  CHECK(p.beta() == 1.0);
  OscKernelParams q{0.5, 0.75, 1};
  CHECK(q.alpha() == doctest::Approx(-1.0));
  CHECK(q.beta() == doctest::Approx(0.0).epsilon(1e-15));
  OscKernelParams r{3.0, 1.0, 2};
  CHECK(r.alpha() == doctest::Approx(1.5));
  CHECK(r.beta() == doctest::Approx(1.0));
  CHECK_NOTHROW(q.validate());
  CHECK_THROWS_AS((OscKernelParams{1.0, 1.0, 1}).validate(), Error);
  CHECK_THROWS_AS((OscKernelParams{-1.0, 1.0, 1}).validate(), Error);
  CHECK_THROWS_AS((OscKernelParams{0.5, 0.5, 1}).validate(), Error);
  CHECK_THROWS_AS((OscKernelParams{0.5, 1.4, 2}).validate(), Error);
  const auto j = nlohmann::json::parse(p.to_json());
  CHECK(j["alpha"].get<double>() == 2.0);

  // Window and resolution guards.
  CHECK_THROWS_AS(OscillatoryKernel(p, GridSpec(1, 256, 16.0), 4.0, 9.0), Error);
  CHECK_THROWS_AS(OscillatoryKernel(p, GridSpec(1, 64, 64.0)), Error);
  CHECK_THROWS_AS(OscillatoryKernel(p, GridSpec(2, 64, 16.0)), Error);
}

TEST_CASE("oscillatory kernel: lattice transform, direct sum and convolution agree") {
  const OscKernelParams p{2.0, 1.0, 1};
  const GridSpec spec(1, 256, 16.0);
  const OscillatoryKernel k(p, spec);
  CHECK(k.samples()[0] == cplx(0.0));
  const auto lat = k.lattice_symbol();
  for (std::size_t i = 0; i < spec.size(); i += 7)
    CHECK(std::abs(lat[i] - k.transform(spec.frequency(i))) < 1e-11);

  const GridFunction f = packet(spec, 1.0, 1.5, 2.0) + packet(spec, -3.0, 0.7, -5.0);
  const GridFunction direct = k.convolve_direct(f);
  const GridFunction spectral = apply_sampled_multiplier(lat, f);
  CHECK(max_diff(direct, spectral) < 1e-11);

  // d = 2.
  const OscKernelParams p2{2.0, 0.5, 2};
  const GridSpec s2(2, 32, 8.0);
  const OscillatoryKernel k2(p2, s2);
  const auto lat2 = k2.lattice_symbol();
  for (std::size_t i = 0; i < s2.size(); i += 37)
    CHECK(std::abs(lat2[i] - k2.transform(s2.frequency(i))) < 1e-11);
  const GridFunction g = GridFunction::sample(s2, [](const Point& x) {
    return cplx(std::exp(-x[0] * x[0] - 0.5 * x[1] * x[1]), x[0] * std::exp(-x[1] * x[1]));
  });
  CHECK(max_diff(k2.convolve_direct(g), apply_sampled_multiplier(lat2, g)) < 1e-11);
}

TEST_CASE("oscillatory kernel a=2: stationary-phase asymptote and symbol class") {
  // Stationary phase at x = xi/2 gives |K^(xi)| ~ sqrt(pi) |xi/2|^{-1}, once
  // xi is large enough for the cutoff near the origin to be negligible and
  // xi/2 still sits below the window.
  const OscKernelParams p{2.0, 1.0, 1};
  const OscillatoryKernel k(p, GridSpec(1, 4096, 64.0));
  CHECK(k.window_perturbation(1.0, 16.0) < 1e-6);
  for (double xi : {24.0, 26.0, 28.0}) {
    const double ratio = std::abs(k.transform({xi, 0.0})) * xi / (2.0 * std::sqrt(M_PI));
    CHECK(ratio == doctest::Approx(1.0).epsilon(0.05));
  }
  CheckOptions opt;
  opt.rho_min = 1.0;
  opt.rho_max = 16.0;
  opt.max_balls = 64;
  opt.nodes_per_axis = 2;
  const ConditionReport rep = miyachi_check(k.symbol(), p.alpha(), p.beta(), opt);
  CHECK(rep.flagged.empty());
  CHECK(rep.constant > 0.5);
  CHECK(rep.constant < 10.0);
}

TEST_CASE("oscillatory kernel a=1/2 on the band [1/2, 1]") {
  const OscKernelParams p{0.5, 0.75, 1};
  const OscillatoryKernel k(p, GridSpec(1, 32768, 2048.0));
  CHECK(k.window_perturbation(0.5, 1.0) < 1e-6);
  CheckOptions opt;
  opt.rho_min = 0.5;
  opt.rho_max = 1.0;
  opt.max_balls = 32;
  opt.nodes_per_axis = 2;
  const ConditionReport rep = miyachi_check(k.symbol(), p.alpha(), p.beta(), opt);
  CHECK(rep.flagged.empty());
  CHECK(rep.constant > 0.1);
  CHECK(rep.constant < 10.0);
}

TEST_CASE("propagator: isometry, group law and transport") {
  const GridSpec spec(1, 512, 64.0);
  const double xi0 = 40.0 * spec.freq_step();
  const GridFunction f = packet(spec, 0.0, 2.0, xi0);
  const GridFunction u = propagator(f, 2.0, 2.0);
  CHECK(std::abs(lp_norm(u, 2.0) - lp_norm(f, 2.0)) < 1e-12 * lp_norm(f, 2.0));
  CHECK(max_diff(propagator(propagator(f, 0.7, 2.0), 1.3, 2.0), u) < 1e-12);
  CHECK(max_diff(propagator(u, -2.0, 2.0), f) < 1e-12);
  // Phase x xi + s xi^2 is stationary at x = -2 s xi.
  const double expect = -2.0 * xi0 * 2.0;
  CHECK(std::abs(centroid(u, expect) - expect) < spec.cell());

  // alpha < 0 keeps the zero mode untouched.
  const GridFunction c = GridFunction::sample(spec, [](const Point&) { return cplx(1.0); });
  CHECK(max_diff(propagator(c, 1.0, -1.0), c) < 1e-13);
}

TEST_CASE("fractional laplacian and bessel potential on pure tones") {
  const GridSpec spec(2, 32, 2.0 * M_PI);
  const GridFunction tone = GridFunction::sample(spec, [](const Point& x) { return cplx(std::cos(3 * x[0] + 4 * x[1])); });
  const GridFunction l = fractional_laplacian(tone, 1.5);
  CHECK(max_diff(l, tone.scaled(std::pow(5.0, 1.5))) < 1e-11);
  const GridFunction back = fractional_laplacian(l, -1.5);
  CHECK(max_diff(back, tone) < 1e-12);
  CHECK(max_diff(fractional_laplacian(tone, 0.0), tone) == 0.0);
  const GridFunction shifted = GridFunction::sample(spec, [](const Point& x) { return cplx(1.0 + std::cos(x[0])); });
  CHECK_THROWS_AS(fractional_laplacian(shifted, -1.0), Error);
  // Positive order kills the mean.
  CHECK(max_diff(fractional_laplacian(shifted, 2.0), shifted - GridFunction::sample(spec, [](const Point&) {
                                                       return cplx(1.0);
                                                     })) < 1e-12);

  const GridFunction b = bessel_potential(tone, -2.0, 0.5);
  CHECK(max_diff(b, tone.scaled(1.0 / (1.0 + 0.25 * 25.0))) < 1e-13);
}

TEST_CASE("scaling identities under dilation") {
  const GridSpec spec(1, 256, 32.0);
  const GridFunction f = packet(spec, 2.0, 1.0, 3.0);
  const double lambda = 2.5;
  const GridFunction fl = dilate(f, lambda);
  CHECK(fl.spec().length() == doctest::Approx(32.0 / lambda));
  CHECK(fl.spec().position(10)[0] * lambda == doctest::Approx(spec.position(10)[0]));

  // |D|^s (f o lambda) = lambda^s (|D|^s f) o lambda.
  const double s = 0.8;
  const GridFunction lhs = fractional_laplacian(fl, s);
  const GridFunction rhs = dilate(fractional_laplacian(f, s), lambda).scaled(std::pow(lambda, s));
  CHECK(max_diff(lhs, rhs) < 1e-11);

  // e^{it|D|^a} (f o lambda) = (e^{i t lambda^a |D|^a} f) o lambda.
  const double a = 1.5, t = 0.3;
  CHECK(max_diff(propagator(fl, t, a), dilate(propagator(f, t * std::pow(lambda, a), a), lambda)) < 1e-11);
  CHECK_THROWS_AS(dilate(f, 0.0), Error);
}
