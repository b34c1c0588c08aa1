#include "subdyadic/partition.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "subdyadic/cutoff.hpp"

namespace subdyadic {

namespace {

constexpr double kShellRatio = 0.5;  // r = kShellRatio * dist^{1-alpha} for enumerated balls

double norm(const Point& p) { return std::hypot(p[0], p[1]); }

void check_range(double alpha, double rho_min, double rho_max) {
  if (!(rho_min > 0.0) || !(rho_max > rho_min) || !std::isfinite(rho_max))
    throw Error("frequency range must satisfy 0 < rho_min < rho_max < inf");
  if (alpha > 0.0 && rho_min < 1.0 - 1e-12)
    throw Error("frequency range violates |xi|^alpha >= 1: alpha > 0 needs rho_min >= 1");
  if (alpha < 0.0 && rho_max > 1.0 + 1e-12)
    throw Error("frequency range violates |xi|^alpha >= 1: alpha < 0 needs rho_max <= 1");
}

}  // namespace

double SubdyadicBall::dist() const { return std::max(norm(center) - radius, 0.0); }

double SubdyadicBall::ratio() const { return radius / std::pow(dist(), 1.0 - alpha); }

bool SubdyadicBall::contains(const Point& xi, double dilation) const {
  const double dx = xi[0] - center[0];
  const double dy = dim == 2 ? xi[1] - center[1] : 0.0;
  return std::hypot(dx, dy) <= dilation * radius * (1.0 + 1e-12);
}

bool SubdyadicBall::satisfies_support_condition() const {
  return std::pow(dist(), alpha) >= 1.0 - 1e-12;
}

double SubdyadicBall::volume() const { return dim == 1 ? 2.0 * radius : kPi * radius * radius; }

// ---------------------------------------------------------------------------

namespace {

struct Shell {
  double band_lo, band_hi;  // radial band the shell is guaranteed to cover
  double center_dist;       // |c| of every ball in the shell
  double radius;
  std::size_t first, count;  // slice of the ball list
};

// Radius with r = kShellRatio * (a - r/2)^{1-alpha}, i.e. the ratio is exact
// for a ball whose near edge sits at a - r/2.
double shell_radius(double a, double alpha) {
  double r = kShellRatio * std::pow(a, 1.0 - alpha);
  for (int it = 0; it < 200; ++it) {
    const double next = kShellRatio * std::pow(std::max(a - r / 2.0, 1e-300), 1.0 - alpha);
    if (std::abs(next - r) <= 1e-15 * r) break;
    r = next;
  }
  return r;
}

int shell_multiplicity(const std::vector<SubdyadicBall>& balls, const std::vector<Shell>& shells, int dim,
                       const Point& p) {
  const double rho = norm(p);
  // shells are ordered by center distance; every shell containing p has
  // center_dist - radius <= rho <= center_dist + radius
  int count = 0;
  for (const Shell& s : shells) {
    if (s.center_dist - s.radius > rho * (1.0 + 1e-12)) break;
    if (s.center_dist + s.radius < rho * (1.0 - 1e-12)) continue;
    if (dim == 1 || s.count <= 7) {
      for (std::size_t i = s.first; i < s.first + s.count; ++i) count += balls[i].contains(p);
      continue;
    }
    const double theta = std::atan2(p[1], p[0]);
    const long n = static_cast<long>(s.count);
    const long j = std::lround(theta / kTwoPi * n);
    for (long dj = -3; dj <= 3; ++dj) {
      const long idx = ((j + dj) % n + n) % n;
      count += balls[s.first + idx].contains(p);
    }
  }
  return count;
}

}  // namespace

BallCover enumerate_balls(int dim, double alpha, double rho_min, double rho_max) {
  if (dim != 1 && dim != 2) throw Error("enumerate_balls: dimension must be 1 or 2");
  check_range(alpha, rho_min, rho_max);
  constexpr std::size_t kMaxBalls = 3'000'000;
  BallCover cover;
  std::vector<Shell> shells;
  double a = rho_min;
  bool first = true;
  while (true) {
    Shell s{};
    if (dim == 1) {
      // the ball [a, a + 2r] touches the band edge exactly
      s.radius = kShellRatio * std::pow(a, 1.0 - alpha);
      s.center_dist = a + s.radius;
      s.band_lo = a;
      s.band_hi = a + 2.0 * s.radius;
    } else {
      s.radius = shell_radius(a, alpha);
      s.center_dist = a + s.radius / 2.0;
      if (alpha > 0.0 && s.center_dist - s.radius < 1.0) {
        // balls may not reach inside the unit sphere; start where they can
        s.radius = kShellRatio;
        s.center_dist = 1.0 + s.radius;
      }
      s.band_lo = s.center_dist - s.radius / 2.0;
      s.band_hi = s.center_dist + s.radius / 2.0;
    }
    if (first) cover.covered_min = std::max(rho_min, s.band_lo);
    first = false;
    s.first = cover.balls.size();
    if (dim == 1) {
      cover.balls.push_back(SubdyadicBall{1, {s.center_dist, 0.0}, s.radius, alpha});
      cover.balls.push_back(SubdyadicBall{1, {-s.center_dist, 0.0}, s.radius, alpha});
    } else {
      // angular spacing keeps every point of the band within r of a center
      const double c = s.center_dist, r = s.radius;
      const long n = std::max<long>(3, static_cast<long>(std::ceil(kTwoPi * (c + r / 2.0) / (std::sqrt(3.0) * r))));
      if (cover.balls.size() + n > kMaxBalls) throw Error("enumerate_balls: range needs too many balls");
      for (long j = 0; j < n; ++j) {
        const double th = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
        cover.balls.push_back(SubdyadicBall{2, {c * std::cos(th), c * std::sin(th)}, r, alpha});
      }
    }
    s.count = cover.balls.size() - s.first;
    shells.push_back(s);
    if (cover.balls.size() > kMaxBalls) throw Error("enumerate_balls: range needs too many balls");
    cover.covered_max = s.band_hi;
    if (s.band_hi >= rho_max) break;
    a = dim == 1 ? a + 1.5 * s.radius : s.band_hi;
  }

  // multiplicity over a deterministic sample of the covered band
  const double lo = cover.covered_min, hi = rho_max;
  const int radial = dim == 1 ? 4096 : 512;
  const int angular = dim == 1 ? 1 : 97;
  for (int i = 0; i < radial; ++i) {
    const double rho = lo + (hi - lo) * (i + 0.5) / radial;
    for (int j = 0; j < angular; ++j) {
      const double th = kTwoPi * (j + 0.25) / angular;
      const Point p = dim == 1 ? Point{rho, 0.0} : Point{rho * std::cos(th), rho * std::sin(th)};
      cover.multiplicity = std::max(cover.multiplicity, shell_multiplicity(cover.balls, shells, dim, p));
    }
  }
  return cover;
}

int ball_multiplicity(const std::vector<SubdyadicBall>& balls, const std::vector<Point>& points) {
  int best = 0;
  for (const Point& p : points) {
    int c = 0;
    for (const auto& b : balls) c += b.contains(p);
    best = std::max(best, c);
  }
  return best;
}

// ---------------------------------------------------------------------------

double PartitionElement::eval(const Point& xi) const {
  const double rho = norm(ball.dim == 1 ? Point{xi[0], 0.0} : xi);
  const double radial = cutoff::annulus(std::ldexp(rho, -k));
  if (radial == 0.0) return 0.0;
  double v = radial * cutoff::lattice_bump(xi[0] / cell - ell[0]);
  if (ball.dim == 2) v *= cutoff::lattice_bump(xi[1] / cell - ell[1]);
  return v;
}

Symbol PartitionElement::symbol() const {
  Symbol s;
  const PartitionElement e = *this;
  s.label = "zeta(k=" + std::to_string(k) + ")";
  s.eval = [e](const Point& xi) { return cplx(e.eval(xi)); };
  return s;
}

SampledCutoff sample_cutoff(const PartitionElement& e, const GridSpec& spec) {
  SampledCutoff out;
  const double dk = spec.freq_step();
  const int half = spec.n() / 2;
  auto axis_range = [&](double lo, double hi) {
    int a = static_cast<int>(std::ceil(lo / dk)), b = static_cast<int>(std::floor(hi / dk));
    return std::array<int, 2>{std::max(a, -half), std::min(b, half - 1)};
  };
  const auto r0 = axis_range(e.support_box[0], e.support_box[1]);
  const auto r1 = spec.dim() == 2 ? axis_range(e.support_box[2], e.support_box[3]) : std::array<int, 2>{0, 0};
  for (int k0 = r0[0]; k0 <= r0[1]; ++k0) {
    for (int k1 = r1[0]; k1 <= r1[1]; ++k1) {
      const std::size_t idx = spec.flat(k0, k1);
      const double v = e.eval(spec.frequency(idx));
      if (v == 0.0) continue;
      out.index.push_back(idx);
      out.value.push_back(v);
    }
  }
  return out;
}

std::vector<PartitionElement> build_partition(const GridSpec& spec, double alpha, double rho_min, double rho_max) {
  if (!(rho_min > 0.0) || !(rho_max >= rho_min)) throw Error("build_partition: need 0 < rho_min <= rho_max");
  if (rho_max > spec.nyquist())
    throw Error("build_partition: rho_max exceeds the lattice Nyquist frequency " + std::to_string(spec.nyquist()));
  const int dim = spec.dim();
  constexpr double kCandidateCap = 2e7;
  std::vector<PartitionElement> out;
  const int k_lo = static_cast<int>(std::floor(std::log2(rho_min))) - 1;
  const int k_hi = static_cast<int>(std::ceil(std::log2(rho_max))) + 1;
  double candidates = 0.0;
  for (int k = k_lo; k <= k_hi; ++k) {
    const double ann_lo = std::ldexp(1.0, k - 1), ann_hi = std::ldexp(1.0, k + 1);
    const double inner = std::max(rho_min, ann_lo), outer = std::min(rho_max, ann_hi);
    if (inner > outer) continue;
    const double s = std::pow(2.0, (1.0 - alpha) * k);
    const double hw = cutoff::kLatticeBumpHalfWidth;
    const int lmax = static_cast<int>(std::floor(outer / s + hw));
    const int lmin = -lmax;
    const double per_axis = lmax - lmin + 1.0;
    candidates += dim == 1 ? per_axis : per_axis * per_axis;
    if (candidates > kCandidateCap) throw Error("build_partition: range too fine for this alpha (too many elements)");
    const int l1max = dim == 2 ? lmax : 0;
    for (int l0 = lmin; l0 <= lmax; ++l0) {
      for (int l1 = -l1max; l1 <= l1max; ++l1) {
        const std::array<double, 4> box{s * (l0 - hw), s * (l0 + hw), s * (l1 - hw), s * (l1 + hw)};
        auto axis_min = [](double lo, double hi) { return lo <= 0.0 && hi >= 0.0 ? 0.0 : std::min(std::abs(lo), std::abs(hi)); };
        auto axis_max = [](double lo, double hi) { return std::max(std::abs(lo), std::abs(hi)); };
        double nmin = axis_min(box[0], box[1]), nmax = axis_max(box[0], box[1]);
        if (dim == 2) {
          nmin = std::hypot(nmin, axis_min(box[2], box[3]));
          nmax = std::hypot(nmax, axis_max(box[2], box[3]));
        }
        if (nmin > outer || nmax < inner) continue;
        PartitionElement e;
        e.k = k;
        e.ell = {l0, dim == 2 ? l1 : 0};
        e.cell = s;
        e.ball.dim = dim;
        e.ball.alpha = alpha;
        e.ball.center = {s * l0, dim == 2 ? s * l1 : 0.0};
        e.ball.radius = 3.0 * std::sqrt(static_cast<double>(dim)) / 7.0 * s;
        e.support_box = {std::max(box[0], -ann_hi), std::min(box[1], ann_hi), dim == 2 ? std::max(box[2], -ann_hi) : 0.0,
                         dim == 2 ? std::min(box[3], ann_hi) : 0.0};
        out.push_back(e);
      }
    }
  }
  return out;
}

GridFunction project(const GridFunction& f, const PartitionElement& e) {
  const Spectrum fh = forward_transform(f);
  const SampledCutoff c = sample_cutoff(e, f.spec());
  std::vector<cplx> data(fh.coeffs.size());
  for (std::size_t i = 0; i < c.index.size(); ++i) data[c.index[i]] = c.value[i] * fh.coeffs[c.index[i]];
  fft_inplace(f.spec(), data, true);
  return GridFunction(f.spec(), std::move(data));
}

std::string partition_manifest_json(const std::vector<PartitionElement>& elements) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& e : elements) {
    nlohmann::ordered_json j;
    j["k"] = e.k;
    j["ell"] = e.ball.dim == 1 ? nlohmann::ordered_json::array({e.ell[0]}) : nlohmann::ordered_json::array({e.ell[0], e.ell[1]});
    j["center"] = e.ball.dim == 1 ? nlohmann::ordered_json::array({e.ball.center[0]})
                                  : nlohmann::ordered_json::array({e.ball.center[0], e.ball.center[1]});
    j["radius"] = e.ball.radius;
    j["support_box"] = e.ball.dim == 1 ? nlohmann::ordered_json::array({e.support_box[0], e.support_box[1]})
                                       : nlohmann::ordered_json::array(
                                             {e.support_box[0], e.support_box[1], e.support_box[2], e.support_box[3]});
    arr.push_back(j);
  }
  return arr.dump(2);
}

}  // namespace subdyadic
