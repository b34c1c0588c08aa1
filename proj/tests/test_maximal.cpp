#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "subdyadic/maximal.hpp"
#include "subdyadic/window.hpp"

using namespace subdyadic;

namespace {

Weight integer_weight(const GridSpec& spec, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> u(0, 9);
  std::vector<double> v(spec.size());
  for (auto& x : v) x = u(rng);
  return Weight(spec, v);
}

Weight random_weight(const GridSpec& spec, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> e(1.0);
  std::vector<double> v(spec.size());
  for (auto& x : v) x = e(rng);
  return Weight(spec, v);
}

Weight spike(const GridSpec& spec, std::size_t at, double mass) {
  std::vector<double> v(spec.size(), 0.0);
  v[at] = mass / spec.cell_volume();
  return Weight(spec, v);
}

void check_exact(const Weight& got, const std::vector<double>& want, const std::string& what) {
  REQUIRE(got.size() == want.size());
  std::size_t bad = 0;
  for (std::size_t i = 0; i < want.size(); ++i) bad += got[i] != want[i];
  CAPTURE(what);
  CHECK(bad == 0);
}

void check_close(const Weight& got, const std::vector<double>& want, double tol) {
  double m = 0.0;
  for (double v : want) m = std::max(m, v);
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::abs(got[i] - want[i]) <= tol * m);
}

// Every operator in the family as a Weight -> Weight map, for generic properties.
std::vector<std::pair<std::string, WeightOperator>> family(int d) {
  std::vector<std::pair<std::string, WeightOperator>> ops = {
      {"hl", [](const Weight& w) { return hl_maximal(w); }},
      {"hl3", [](const Weight& w) { return hl_maximal(w, 3); }},
      {"fractional", [](const Weight& w) { return fractional_maximal(w, 0.2); }},
      {"subdyadic", [](const Weight& w) { return subdyadic_maximal(w, 0.5, 0.25); }},
      {"subdyadic-neg", [](const Weight& w) { return subdyadic_maximal(w, -1.0, 0.25); }},
      {"global", [](const Weight& w) { return global_maximal(w, 2.0, 0.2, 1.5); }},
      {"inhomogeneous", [](const Weight& w) { return inhomogeneous_maximal(w, 2.0, 0.25, 3.0); }},
      {"average", [](const Weight& w) { return scale_average(w, 2 * w.spec().cell()); }},
      {"running", [](const Weight& w) { return running_sup_average(w, 2 * w.spec().cell()); }},
      {"regularised",
       [](const Weight& w) { return regularised_maximal(w, 0.5, 0.25, RadialProfile::standard()); }},
  };
  if (d == 2) ops.push_back({"nikodym", [](const Weight& w) { return nikodym_maximal(w, 0.5, 0.25); }});
  return ops;
}

}  // namespace

TEST_CASE("radius grid and lattice balls") {
  for (int d : {1, 2}) {
    GridSpec spec(d, 32, 8.0);
    const auto r = radius_grid(spec);
    const double h = spec.cell();
    CHECK(r.front() == 0.5 * h);
    CHECK(r[1] == h);
    CHECK(r.back() == doctest::Approx(4.0 * std::sqrt(d)));
    for (std::size_t i = 2; i + 1 < r.size(); ++i) CHECK(r[i] / r[i - 1] == doctest::Approx(std::pow(2.0, 0.25)));
    CHECK(ball_volume(spec, r.front()) == spec.cell_volume());
    CHECK(ball_volume(spec, r.back()) == doctest::Approx(spec.volume()));
  }
}

TEST_CASE("oracle equivalence: ball operators, integer weights, bit exact") {
  const GridSpec s1(1, 16, 4.0), s2(2, 8, 4.0);
  for (const GridSpec& spec : {s1, s2}) {
    CAPTURE(spec.dim());
    for (unsigned seed : {1u, 2u}) {
      const Weight w = integer_weight(spec, seed);
      check_exact(hl_maximal(w), oracle::hl(w), "hl_maximal");
      // the iterate sees non-integer input, so prefix sums round
      check_close(hl_maximal(w, 2), oracle::hl(hl_maximal(w)), 1e-14);
      for (double beta : {0.0, 0.2}) check_exact(fractional_maximal(w, beta), oracle::fractional(w, beta), "fractional_maximal");
      for (double alpha : {-1.0, 0.0, 0.5, 2.0})
        for (double beta : {-0.125, 0.0, 0.25, 0.5}) {
          CAPTURE(alpha);
          CAPTURE(beta);
          check_exact(subdyadic_maximal(w, alpha, beta), oracle::subdyadic_max(w, alpha, beta), "subdyadic_maximal");
          if (beta >= 0.0 && 2 * beta < spec.dim())
            for (double sv : {0.5, 1.0, 3.0})
              check_exact(global_maximal(w, alpha, beta, sv), oracle::global_max(w, alpha, beta, sv), "global_maximal");
          if (alpha != 0.0)
            for (double sv : {0.5, 1.0, 3.0})
              check_exact(inhomogeneous_maximal(w, alpha, beta, sv), oracle::inhomogeneous(w, alpha, beta, sv), "inhomogeneous_maximal");
        }
      for (double t : {spec.cell(), 1.3 * spec.cell(), 2.0}) {
        check_exact(running_sup_average(w, t), oracle::running_sup(w, t), "running_sup_average");
        std::vector<double> avg(spec.size());
        for (std::size_t x = 0; x < spec.size(); ++x) {
          auto [sum, count] = oracle::ball(w, x, t);
          avg[x] = sum / static_cast<double>(count);
        }
        check_exact(scale_average(w, t), avg, "scale_average");
      }
    }
  }
}

TEST_CASE("oracle equivalence: tubes and regularised averages") {
  const GridSpec s2(2, 8, 4.0);
  for (unsigned seed : {3u, 4u}) {
    const Weight w = integer_weight(s2, seed);
    for (double alpha : {-1.0, 0.5, 2.0})
      for (double beta : {0.0, 0.5}) {
        CAPTURE(alpha);
        check_exact(nikodym_maximal(w, alpha, beta), oracle::nikodym(w, alpha, beta), "nikodym_maximal");
      }
  }
  const RadialProfile p = RadialProfile::standard();
  for (const GridSpec& spec : {GridSpec(1, 16, 4.0), s2}) {
    const Weight w = random_weight(spec, 5);
    for (double alpha : {-1.0, 0.0, 0.5, 2.0}) {
      CAPTURE(alpha);
      check_close(regularised_maximal(w, alpha, 0.25, p), oracle::regularised(w, alpha, 0.25, p), 1e-12);
    }
  }
}

TEST_CASE("positivity, sublinearity and homogeneity") {
  for (int d : {1, 2}) {
    GridSpec spec(d, d == 1 ? 64 : 16, 8.0);
    const Weight a = random_weight(spec, 10), b = random_weight(spec, 11);
    for (const auto& [name, op] : family(d)) {
      CAPTURE(name);
      const Weight ab = op(a + b), oa = op(a), ob = op(b), o3 = op(a.scaled(3.0));
      for (std::size_t i = 0; i < spec.size(); ++i) {
        CHECK(oa[i] >= 0.0);
        CHECK(ab[i] <= (oa[i] + ob[i]) * (1.0 + 1e-12));
        CHECK(o3[i] == doctest::Approx(3.0 * oa[i]).epsilon(1e-12));
      }
      CHECK(op(Weight::constant(spec, 0.0)).max() <= 1e-300);
    }
  }
}

TEST_CASE("Hardy-Littlewood: constants, dominance, closed-form optimum") {
  GridSpec spec(1, 256, 16.0);  // h = 1/16, radius 2 is on the grid
  const Weight one = Weight::constant(spec, 1.0);
  const Weight m1 = hl_maximal(one);
  for (std::size_t i = 0; i < spec.size(); ++i) CHECK(m1[i] == 1.0);
  const Weight w = random_weight(spec, 3), mw = hl_maximal(w), mmw = hl_maximal(mw);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    CHECK(mw[i] >= w[i]);
    CHECK(mmw[i] >= mw[i]);
  }
  // indicator of [0, 1]; at x = 2 the continuum optimum is r = 2 with value 1/4
  const Weight ind = Weight::sample(spec, [](const Point& x) { return x[0] <= 1.0 + 1e-9 ? 1.0 : 0.0; });
  const std::size_t at = 32;
  CHECK(hl_maximal(ind)[at] == doctest::Approx(0.25).epsilon(0.1));
  double best = 0, best_r = 0;
  for (double r : radius_grid(spec)) {
    const double v = ball_integrals(ind, r)[at] / ball_volume(spec, r);
    if (v > best) best = v, best_r = r;
  }
  CHECK(best_r == doctest::Approx(2.0));
  CHECK(best == hl_maximal(ind)[at]);
}

TEST_CASE("fractional maximal: spike scan, volume constants, rejection") {
  GridSpec spec(1, 128, 16.0);
  const std::size_t x0 = 40;
  const double beta = 0.2;
  const Weight w = spike(spec, x0, 1.0);
  const Weight m = fractional_maximal(w, beta);
  const auto grid = radius_grid(spec);
  for (std::size_t x = 0; x < spec.size(); ++x) {
    const double dist = spec.periodic_distance(x, x0);
    double want = 0.0;
    for (double r : grid)
      if (dist <= r * (1 + 1e-12)) want = std::max(want, std::pow(r, 2 * beta - 1));
    CHECK(m[x] == doctest::Approx(want).epsilon(1e-12));
  }
  const auto vb = fractional_volume_bounds(spec);
  const Weight a = random_weight(spec, 8), f0 = fractional_maximal(a, 0.0), hl = hl_maximal(a);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    CHECK(f0[i] >= vb[0] * hl[i] * (1 - 1e-12));
    CHECK(f0[i] <= vb[1] * hl[i] * (1 + 1e-12));
  }
  CHECK_THROWS_AS(fractional_maximal(a, 0.5), Error);
  CHECK_THROWS_AS(fractional_maximal(a, -0.1), Error);
}

TEST_CASE("subdyadic maximal: constants, beta monotonicity, alpha = 0 comparison") {
  for (int d : {1, 2}) {
    GridSpec spec(d, d == 1 ? 128 : 32, 8.0);
    const Weight one = Weight::constant(spec, 1.0);
    for (double beta : {0.0, 0.25}) {
      const Weight m = subdyadic_maximal(one, 2.0, beta);
      for (std::size_t i = 0; i < spec.size(); ++i) CHECK(m[i] == doctest::Approx(1.0).epsilon(1e-14));
    }
    const Weight w = random_weight(spec, 20 + d);
    for (double alpha : {0.5, 1.0, 2.0}) {
      const Weight lo = subdyadic_maximal(w, alpha, 0.1), hi = subdyadic_maximal(w, alpha, 0.4);
      for (std::size_t i = 0; i < spec.size(); ++i) CHECK(hi[i] <= lo[i]);
    }
    // alpha = 0: centered balls are in the region; every admissible ball sits in B(x, 2r)
    const double beta = 0.25;
    const Weight s0 = subdyadic_maximal(w, 0.0, beta), fr = fractional_maximal(w, beta);
    const auto grid = radius_grid(spec);
    double lower = INFINITY, upper = 0.0;
    for (double r : grid) {
      lower = std::min(lower, std::pow(r, d) / ball_volume(spec, r));
      double big = grid.back();
      for (double x : grid)
        if (x >= 2 * r) {
          big = x;
          break;
        }
      upper = std::max(upper, std::pow(r, 2 * beta) / ball_volume(spec, r) / std::pow(big, 2 * beta - d));
    }
    MESSAGE("d=" << d << " alpha=0 comparison constants " << lower << " " << upper);
    for (std::size_t i = 0; i < spec.size(); ++i) {
      CHECK(s0[i] >= lower * fr[i] * (1 - 1e-12));
      CHECK(s0[i] <= upper * fr[i] * (1 + 1e-12));
    }
    CHECK_THROWS_AS(subdyadic_maximal(Weight::constant(GridSpec(d, 8, 1.0), 1.0), -1.0, 0.0), Error);
  }
}

TEST_CASE("global and inhomogeneous maximal operators") {
  for (int d : {1, 2}) {
    GridSpec spec(d, d == 1 ? 128 : 32, 8.0);
    const Weight w = random_weight(spec, 30 + d);
    for (double alpha : {-1.0, 0.5, 2.0}) {
      Weight prev = global_maximal(w, alpha, 0.2, 0.25);
      for (double sv : {0.5, 1.0, 2.0, 8.0}) {
        const Weight cur = global_maximal(w, alpha, 0.2, sv);
        for (std::size_t i = 0; i < spec.size(); ++i) CHECK(prev[i] <= cur[i]);
        prev = cur;
      }
      const Weight sub = subdyadic_maximal(w, alpha, 0.2), glob = global_maximal(w, alpha, 0.2);
      for (std::size_t i = 0; i < spec.size(); ++i) CHECK(sub[i] <= glob[i]);
    }
    CHECK_THROWS_AS(global_maximal(w, 1.0, 0.5 * d, 1.0), Error);
    for (double alpha : {0.5, 2.0}) {
      const Weight a = inhomogeneous_maximal(w, alpha, 0.3, 1.0), b = subdyadic_maximal(w, alpha, 0.3);
      for (std::size_t i = 0; i < spec.size(); ++i) CHECK(a[i] == b[i]);
    }
    const Weight c = inhomogeneous_maximal(Weight::constant(spec, 1.0), 2.0, 0.4, 3.0);
    for (std::size_t i = 0; i < spec.size(); ++i) CHECK(c[i] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(inhomogeneous_maximal(w, 0.0, 0.3, 1.0), Error);
  }
}

TEST_CASE("Nikodym tubes: constants, chain, thin tube") {
  CHECK_THROWS_AS(nikodym_maximal(Weight::constant(GridSpec(1, 16, 4.0), 1.0), 0.5, 0.0), Error);
  GridSpec spec(2, 32, 8.0);
  CHECK_THROWS_AS(nikodym_maximal(Weight::constant(spec, 1.0), 0.0, 0.0), Error);
  for (double alpha : {0.5, 2.0}) {
    const Weight one = nikodym_maximal(Weight::constant(spec, 1.0), alpha, 0.3);
    for (std::size_t i = 0; i < spec.size(); ++i) CHECK(one[i] == doctest::Approx(1.0).epsilon(1e-14));
  }
  for (double alpha : {-1.0, 0.5, 2.0}) {
    const double c = nikodym_chain_constant(spec, alpha);
    const Weight w = random_weight(spec, 40), n = nikodym_maximal(w, alpha, 0.25), m = subdyadic_maximal(w, alpha, 0.25);
    double worst = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) worst = std::max(worst, n[i] / m[i]);
    MESSAGE("alpha=" << alpha << " chain constant " << c << " observed " << worst);
    CHECK(worst <= c);
  }
  // one horizontal thin tube of width one cell: axis points see mass, far points do not
  const double alpha = 2.0;
  std::vector<double> v(spec.size(), 0.0);
  for (int j = 0; j < spec.n(); ++j) v[spec.flat(16, j)] = 1.0;
  const Weight tube(spec, v);
  const Weight nk = nikodym_maximal(tube, alpha, 0.0);
  const double on_axis = nk[spec.flat(16, 3)];
  const double off_axis = nk[spec.flat(16 + 8, 3)];  // two length units away, beyond every r = 1 tube width
  MESSAGE("tube axis " << on_axis << " transversal " << off_axis);
  CHECK(on_axis == doctest::Approx(1.0));
  CHECK(off_axis < 0.5 * on_axis);
}

TEST_CASE("scale averages") {
  for (int d : {1, 2}) {
    GridSpec spec(d, d == 1 ? 128 : 32, 8.0);
    const Weight one = Weight::constant(spec, 1.0);
    for (double t : {spec.cell(), 1.0, 4.0}) {
      const Weight a = scale_average(one, t), s = running_sup_average(one, t);
      for (std::size_t i = 0; i < spec.size(); ++i) {
        CHECK(a[i] == 1.0);
        CHECK(s[i] == 1.0);
      }
    }
    const Weight w = random_weight(spec, 50 + d), mw = hl_maximal(w);
    for (double t : {spec.cell(), 0.7, 2.0}) {
      const Weight a = scale_average(w, t), s = running_sup_average(w, t), am = scale_average(mw, t);
      const double c = running_sup_constant(spec, t);
      double worst = 0.0;
      for (std::size_t i = 0; i < spec.size(); ++i) {
        CHECK(a[i] <= s[i]);
        CHECK(s[i] <= c * am[i] * (1 + 1e-12));
        worst = std::max(worst, s[i] / am[i]);
      }
      MESSAGE("d=" << d << " t=" << t << " C=" << c << " observed " << worst);
    }
    // spike: the average is mass / |B| exactly where the ball covers it
    const std::size_t at = spec.size() / 3;
    const Weight sp = spike(spec, at, 2.0);
    const double t = 1.0;
    const Weight a = scale_average(sp, t);
    for (std::size_t x = 0; x < spec.size(); ++x) {
      const double want = spec.periodic_distance(x, at) <= t * (1 + 1e-12) ? 2.0 / ball_volume(spec, t) : 0.0;
      CHECK(a[x] == doctest::Approx(want).epsilon(1e-12));
    }
    CHECK_THROWS_AS(scale_average(w, 0.5 * spec.cell()), Error);
    CHECK_THROWS_AS(scale_average(w, spec.length()), Error);
  }
}

TEST_CASE("regularised maximal: domination and endpoint bounds") {
  const RadialProfile p = RadialProfile::standard();
  for (int d : {1, 2}) {
    GridSpec spec(d, d == 1 ? 128 : 32, 8.0);
    const Weight w = random_weight(spec, 60 + d);
    for (double alpha : {-1.0, 0.5, 2.0}) {
      const double c = regularised_domination_constant(spec, alpha, p);
      CHECK(c > 0.0);
      for (double beta : {0.0, 0.25}) {
        const Weight reg = regularised_maximal(w, alpha, beta, p), sub = subdyadic_maximal(w, alpha, beta);
        for (std::size_t i = 0; i < spec.size(); ++i) CHECK(reg[i] >= c * sub[i] * (1 - 1e-9));
      }
      double l1 = 0.0;
      for (double r : admissible_radii(spec, alpha)) l1 = std::max(l1, p.lattice_l1(spec, r));
      CHECK(regularised_maximal(w, alpha, 0.0, p).max() <= l1 * w.max() * (1 + 1e-9));
      CHECK(regularised_maximal(w, alpha, 0.5 * d, p).max() <= p.sup() * integral(w) * (1 + 1e-9));
    }
    // the lattice l1 of P_r tends to the continuum one at resolved radii
    const double cont = d == 1 ? 3.0 : 0.0;
    if (d == 1) CHECK(p.lattice_l1(spec, 1.0) == doctest::Approx(cont).epsilon(0.02));
  }
  const RadialProfile hole{"hole", [](double r) { return r < 0.5 || r > 2.0 ? 0.0 : 1.0; }, 2.0};
  const RadialProfile negative{"negative", [](double r) { return r < 1.5 ? 1.0 : -0.1; }, 2.0};
  const RadialProfile leaky{"leaky", [](double r) { return 1.0 / (1.0 + r); }, 2.0};
  const Weight w = Weight::constant(GridSpec(1, 16, 4.0), 1.0);
  for (const auto& bad : {hole, negative, leaky}) CHECK_THROWS_AS(regularised_maximal(w, 0.5, 0.0, bad), Error);
}

TEST_CASE("operator-norm trends: spike witness across boxes") {
  const CorpusFactory spikes = [](const GridSpec& spec) {
    std::vector<Weight> ws;
    for (int width : {1, 2, 4}) {
      std::vector<double> v(spec.size(), 0.0);
      for (int j = 0; j < width; ++j) v[j] = 1.0;
      ws.emplace_back(spec, v);
    }
    return ws;
  };
  const auto boxes = opnorm_boxes(1, 2.0, 0.25, 8.0, 4);
  REQUIRE(boxes.size() == 4);
  for (const auto& b : boxes) CHECK(b.length() >= 4.0 / b.cell());
  auto on = empirical_opnorm([](const Weight& w) { return subdyadic_maximal(w, 2.0, 0.5); }, 2, 2, spikes, boxes, 2.0,
                             0.5);
  auto below = empirical_opnorm([](const Weight& w) { return subdyadic_maximal(w, 2.0, 0.25); }, 2, 2, spikes, boxes,
                                2.0, 0.25);
  MESSAGE(on.to_json());
  MESSAGE(below.to_json());
  CHECK(on.verdict == "bounded");
  CHECK(below.verdict == "growing");
  CHECK(below.fitted_exponent > 0.1);
  CHECK(on.to_json().find("\"fitted_exponent\"") != std::string::npos);
  CHECK_THROWS_AS(empirical_opnorm([](const Weight& w) { return w; }, 1.0, 2.0, spikes, boxes), Error);
  CHECK_THROWS_AS(empirical_opnorm([](const Weight& w) { return w; }, 2.0, 2.0,
                                   [](const GridSpec&) { return std::vector<Weight>{}; }, boxes),
                  Error);
}
