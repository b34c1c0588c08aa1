// Miyachi and subdyadic Hormander checkers for black-box symbols.

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "subdyadic/cutoff.hpp"
#include "subdyadic/partition.hpp"

namespace subdyadic {

namespace {

double norm(const Point& p) { return std::hypot(p[0], p[1]); }

cplx value(const Symbol& m, const Point& xi) {
  if (m.support && !m.support(xi)) return 0.0;
  return m.eval(xi);
}

bool in_support(const Symbol& m, const Point& xi) { return !m.support || m.support(xi); }

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<std::array<int, 2>> orders(int dim, int gamma_max) {
  std::vector<std::array<int, 2>> out;
  for (int g0 = 0; g0 <= gamma_max; ++g0)
    for (int g1 = 0; g1 <= (dim == 2 ? gamma_max - g0 : 0); ++g1) out.push_back({g0, g1});
  return out;
}

// Stencil of the tensor central difference; false if a node leaves the support.
bool stencil_in_support(const Symbol& m, const Point& xi, std::array<int, 2> g, double h) {
  if (!m.support) return true;
  for (int j0 = 0; j0 <= g[0]; ++j0)
    for (int j1 = 0; j1 <= g[1]; ++j1) {
      const Point p{xi[0] + (g[0] / 2.0 - j0) * h, xi[1] + (g[1] / 2.0 - j1) * h};
      if (!m.support(p)) return false;
    }
  return true;
}

cplx central_difference(const Symbol& m, const Point& xi, std::array<int, 2> g, double h) {
  cplx acc = 0.0;
  for (int j0 = 0; j0 <= g[0]; ++j0) {
    const double c0 = ((j0 & 1) ? -1.0 : 1.0) * binomial(g[0], j0);
    for (int j1 = 0; j1 <= g[1]; ++j1) {
      const double c1 = ((j1 & 1) ? -1.0 : 1.0) * binomial(g[1], j1);
      const Point p{xi[0] + (g[0] / 2.0 - j0) * h, xi[1] + (g[1] / 2.0 - j1) * h};
      acc += c0 * c1 * value(m, p);
    }
  }
  return acc / std::pow(h, g[0] + g[1]);
}

int resolve_gamma_max(const CheckOptions& opt) { return opt.gamma_max >= 0 ? opt.gamma_max : opt.dim / 2 + 1; }

std::vector<SubdyadicBall> strided(const BallCover& cover, std::size_t cap) {
  if (cover.balls.size() <= cap) return cover.balls;
  std::vector<SubdyadicBall> out;
  const double step = static_cast<double>(cover.balls.size()) / cap;
  for (std::size_t i = 0; i < cap; ++i) out.push_back(cover.balls[static_cast<std::size_t>(i * step)]);
  return out;
}

// Midpoint nodes of an n^d grid on the bounding box, kept if inside the ball.
std::vector<Point> ball_nodes(const SubdyadicBall& b, int n) {
  std::vector<Point> out;
  for (int i = 0; i < n; ++i) {
    const double u = -1.0 + (2.0 * i + 1.0) / n;
    if (b.dim == 1) {
      out.push_back({b.center[0] + u * b.radius, 0.0});
      continue;
    }
    for (int j = 0; j < n; ++j) {
      const double v = -1.0 + (2.0 * j + 1.0) / n;
      if (u * u + v * v > 1.0) continue;
      out.push_back({b.center[0] + u * b.radius, b.center[1] + v * b.radius});
    }
  }
  return out;
}

std::vector<Point> radial_samples(int dim, double lo, double hi) {
  std::vector<Point> out;
  const int per_octave = 64;
  const int count = std::max(2, static_cast<int>(std::ceil(std::log2(hi / lo) * per_octave)) + 1);
  const int dirs = dim == 1 ? 2 : 8;
  for (int i = 0; i < count; ++i) {
    const double rho = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    for (int d = 0; d < dirs; ++d) {
      const double th = kTwoPi * (d + (dim == 2 ? 0.1 : 0.0)) / dirs;
      out.push_back(dim == 1 ? Point{d == 0 ? rho : -rho, 0.0} : Point{rho * std::cos(th), rho * std::sin(th)});
    }
  }
  return out;
}

ConditionReport base_report(const char* name, double alpha, double beta, const CheckOptions& opt) {
  ConditionReport r;
  r.condition = name;
  r.alpha = alpha;
  r.beta = beta;
  r.rho_min = opt.rho_min;
  r.rho_max = opt.rho_max;
  return r;
}

}  // namespace

double derivative_step(double rho, double alpha) { return std::min(1e-4 * std::pow(rho, 1.0 - alpha), 1e-4); }

std::array<cplx, 2> symbol_derivative(const Symbol& m, const Point& xi, std::array<int, 2> gamma, double h, int dim) {
  if (dim == 1) gamma[1] = 0;
  return {central_difference(m, xi, gamma, h / 2.0), central_difference(m, xi, gamma, h)};
}

ConditionReport miyachi_check(const Symbol& m, double alpha, double beta, const CheckOptions& opt) {
  ConditionReport rep = base_report("miyachi", alpha, beta, opt);
  const BallCover cover = enumerate_balls(opt.dim, alpha, opt.rho_min, opt.rho_max);
  std::vector<Point> pts = radial_samples(opt.dim, opt.rho_min, opt.rho_max);
  for (const auto& b : strided(cover, opt.max_balls))
    for (const Point& p : ball_nodes(b, opt.nodes_per_axis)) pts.push_back(p);
  pts.insert(pts.end(), opt.extra_points.begin(), opt.extra_points.end());
  const auto gammas = orders(opt.dim, resolve_gamma_max(opt));
  for (const Point& xi : pts) {
    const double rho = norm(xi);
    if (rho == 0.0 || !in_support(m, xi)) continue;
    const double h = derivative_step(rho, alpha);
    for (const auto& g : gammas) {
      if (!stencil_in_support(m, xi, g, h)) continue;
      const int order = g[0] + g[1];
      const double weight = std::pow(rho, beta - order * (alpha - 1.0));
      const auto d = symbol_derivative(m, xi, g, h, opt.dim);
      const double fine = std::abs(d[0]) * weight, coarse = std::abs(d[1]) * weight;
      ++rep.samples;
      if (std::abs(d[0] - d[1]) * weight > 0.1 * std::max(fine, 1e-3)) {
        rep.flagged.push_back({xi, g, coarse, fine});
        continue;
      }
      if (fine > rep.constant) {
        rep.constant = fine;
        rep.worst_point = xi;
        rep.worst_order = g;
      }
    }
  }
  return rep;
}

ConditionReport hormander_sd_check(const Symbol& m, double alpha, double beta, const CheckOptions& opt) {
  ConditionReport rep = base_report("hormander_sd", alpha, beta, opt);
  const BallCover cover = enumerate_balls(opt.dim, alpha, opt.rho_min, opt.rho_max);
  const auto gammas = orders(opt.dim, resolve_gamma_max(opt));
  for (const auto& b : strided(cover, opt.max_balls)) {
    const auto nodes = ball_nodes(b, opt.nodes_per_axis);
    const double dist = b.dist();
    for (const auto& g : gammas) {
      const int order = g[0] + g[1];
      double sum = 0.0;
      bool usable = true;
      for (const Point& xi : nodes) {
        const double h = derivative_step(norm(xi), alpha);
        if (!in_support(m, xi) || !stencil_in_support(m, xi, g, h)) {
          usable = false;
          break;
        }
        const auto d = symbol_derivative(m, xi, g, h, opt.dim);
        const double w = std::pow(norm(xi), beta - order * (alpha - 1.0));
        if (std::abs(d[0] - d[1]) * w > 0.1 * std::max(std::abs(d[0]) * w, 1e-3))
          rep.flagged.push_back({xi, g, std::abs(d[1]) * w, std::abs(d[0]) * w});
        sum += std::norm(d[0]);
      }
      if (!usable || nodes.empty()) continue;
      ++rep.samples;
      const double v = std::pow(dist, beta + (1.0 - alpha) * order) * std::sqrt(sum / nodes.size());
      if (v > rep.constant) {
        rep.constant = v;
        rep.worst_point = b.center;
        rep.worst_order = g;
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

double BumpFunction::derivative_sup() const {
  const double h = 1e-3;
  const int n = dim == 1 ? 4001 : 161;
  double best = 0.0;
  const int top = bump_order(dim);
  for (const auto& g : orders(dim, top)) {
    Symbol s;
    s.eval = [this](const Point& u) { return cplx(profile(u)); };
    for (int i = 0; i < n; ++i) {
      const double x = -2.2 + 4.4 * i / (n - 1);
      for (int j = 0; j < (dim == 2 ? n : 1); ++j) {
        const double y = dim == 2 ? -2.2 + 4.4 * j / (n - 1) : 0.0;
        best = std::max(best, std::abs(central_difference(s, {x, y}, g, h)));
      }
    }
  }
  return best;
}

double BumpFunction::eval(const SubdyadicBall& ball, const Point& xi) const {
  const Point u{(xi[0] - ball.center[0]) / ball.radius, dim == 2 ? (xi[1] - ball.center[1]) / ball.radius : 0.0};
  return profile(u);
}

std::vector<BumpFunction> standard_bumps(int dim) {
  auto radial = [dim](Point c, double plateau_end, double zero_at) {
    return [dim, c, plateau_end, zero_at](const Point& u) {
      const double r = std::hypot(u[0] - c[0], dim == 2 ? u[1] - c[1] : 0.0);
      return cutoff::ramp_down(r, plateau_end, zero_at);
    };
  };
  std::vector<BumpFunction> out;
  // centred bump with a long transition, and an off-centre one
  BumpFunction a{"centred", radial({0.0, 0.0}, 0.0, 2.0), dim};
  BumpFunction b{"offset", radial({0.3, 0.0}, 0.0, 1.7), dim};
  for (BumpFunction* f : {&a, &b}) {
    const double s = f->derivative_sup();
    const auto raw = f->profile;
    // small safety margin over the sampled supremum
    const double c = 1.0 / (s * (1.0 + 1e-3));
    f->profile = [raw, c](const Point& u) { return c * raw(u); };
    out.push_back(*f);
  }
  return out;
}

std::vector<double> default_thetas(int dim) {
  const double s = default_sigma(dim);
  return {0.0, s / 2.0, s};
}

ConditionReport hormander_sob_check(const Symbol& m, double alpha, double beta, std::vector<double> thetas,
                                    const std::vector<BumpFunction>& bumps, const CheckOptions& opt) {
  ConditionReport rep = base_report("hormander_sob", alpha, beta, opt);
  for (const auto& bump : bumps) {
    if (bump.dim != opt.dim) throw Error("hormander_sob_check: bump dimension mismatch");
    if (bump.derivative_sup() > 1.0 + 1e-9)
      throw Error("hormander_sob_check: bump '" + bump.label + "' violates the derivative normalisation");
    for (double x : {-2.0, 2.0, 2.1})
      for (double y : {0.0, 1.0 / std::sqrt(2.0)})
        if (std::abs(x) >= 2.0 && bump.profile({x, opt.dim == 2 ? y : 0.0}) != 0.0)
          throw Error("hormander_sob_check: bump '" + bump.label + "' is not supported in the double ball");
  }
  const double sigma_cap = default_sigma(opt.dim);
  for (double t : thetas)
    if (t < 0.0 || t > sigma_cap + 1e-12) throw Error("hormander_sob_check: theta outside [0, sigma]");

  const BallCover cover = enumerate_balls(opt.dim, alpha, opt.rho_min, opt.rho_max);
  const int nloc = opt.dim == 1 ? 64 : 32;
  for (const auto& b : strided(cover, opt.max_balls)) {
    const double side = 8.0 * b.radius;
    const GridSpec local(opt.dim, nloc, side);
    const double h = local.cell();
    for (const auto& bump : bumps) {
      std::vector<cplx> v(local.size());
      bool usable = true;
      for (std::size_t i = 0; i < v.size() && usable; ++i) {
        const auto idx = local.axis_indices(i);
        const Point xi{b.center[0] - side / 2.0 + idx[0] * h, opt.dim == 2 ? b.center[1] - side / 2.0 + idx[1] * h : 0.0};
        const double psi = bump.eval(b, xi);
        if (psi == 0.0) continue;
        if (!in_support(m, xi)) usable = false;
        v[i] = psi * m.eval(xi);
      }
      if (!usable) continue;
      ++rep.samples;
      const GridFunction g(local, std::move(v));
      for (double theta : thetas) {
        const double val = std::pow(b.dist(), beta + (1.0 - alpha) * theta) / std::sqrt(b.volume()) *
                           sobolev_seminorm(g, theta);
        if (val > rep.constant) {
          rep.constant = val;
          rep.worst_point = b.center;
          rep.worst_theta = theta;
        }
      }
    }
  }
  return rep;
}

std::string ConditionReport::to_json() const {
  nlohmann::ordered_json j;
  j["condition"] = condition;
  j["constant"] = constant;
  j["worst_point"] = {worst_point[0], worst_point[1]};
  j["worst_order"] = {worst_order[0], worst_order[1]};
  j["worst_theta"] = worst_theta;
  j["range"] = {rho_min, rho_max};
  j["parameters"] = {{"alpha", alpha}, {"beta", beta}};
  j["samples"] = samples;
  j["flagged"] = flagged.size();
  return j.dump(2);
}

}  // namespace subdyadic
