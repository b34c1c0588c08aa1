#include "subdyadic/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include "convolution.hpp"
#include "json.hpp"
#include "subdyadic/cutoff.hpp"
#include "subdyadic/simd.hpp"
#include "subdyadic/window.hpp"

namespace subdyadic {

namespace {

constexpr double kSlack = 1e-12;

bool admissible(double r, double alpha) { return std::pow(r, alpha) <= 1.0 + kSlack; }

// Running max with the averaged values of one scale: out = max(out, v) when
// reach < 0, else out = max(out, sup of v over the window of that reach).
void fold_max(const GridSpec& spec, const std::vector<double>& v, double reach, std::vector<double>& out) {
  if (reach < 0.0) {
    simd::kernels().vmax(v.data(), out.data(), out.size());
    return;
  }
  const auto m = window_max(spec, v, Window(spec, reach));
  simd::kernels().vmax(m.data(), out.data(), out.size());
}

Weight as_weight(const GridSpec& spec, std::vector<double> v) {
  for (auto& x : v) x = std::max(x, 0.0);
  return Weight(spec, std::move(v));
}

// Per-row prefix sums over three copies, column j of row r at p[r][j + N].
class PrefixRows {
 public:
  explicit PrefixRows(const Weight& w) : n_(w.spec().n()), p_(static_cast<std::size_t>(n_) * (3 * n_ + 1)) {
    const auto v = w.values();
    for (int r = 0; r < n_; ++r) {
      double* row = &p_[static_cast<std::size_t>(r) * (3 * n_ + 1)];
      row[0] = 0.0;
      for (int k = 0; k < 3 * n_; ++k) row[k + 1] = row[k] + v[static_cast<std::size_t>(r) * n_ + k % n_];
    }
  }
  // sum of row r over columns [c + lo, c + hi], -N < lo <= hi < 2N - c
  double range(int r, int c, int lo, int hi) const {
    const double* row = &p_[static_cast<std::size_t>(r) * (3 * n_ + 1)];
    return row[c + hi + n_ + 1] - row[c + lo + n_];
  }

 private:
  int n_;
  std::vector<double> p_;
};

// Offsets of a convex set as per-row column intervals (minimum image).
struct Segment {
  int o0, lo, hi;
};

std::vector<Segment> tube_segments(const GridSpec& spec, double r, double length, double angle, std::size_t& count) {
  const int n = spec.n(), half = n / 2;
  std::vector<Segment> segs;
  count = 0;
  for (int o0 = -half + 1; o0 <= half; ++o0) {
    int start = 0;
    bool open = false;
    for (int o1 = -half + 1; o1 <= half + 1; ++o1) {
      const bool in = o1 <= half && tube_contains(spec, r, length, angle, o0, o1);
      if (in && !open) {
        start = o1;
        open = true;
      } else if (!in && open) {
        segs.push_back({o0, start, o1 - 1});
        count += static_cast<std::size_t>(o1 - start);
        open = false;
      }
    }
  }
  return segs;
}

// out[c] = max of row over columns [c + a, c + b], periodic.
void range_max_row(const double* row, int n, int a, int b, double* out) {
  if (b - a + 1 >= n) {
    std::fill(out, out + n, *std::max_element(row, row + n));
    return;
  }
  auto val = [&](int j) { return row[((j % n) + n) % n]; };
  std::deque<int> dq;
  for (int j = a; j < n + b; ++j) {
    while (!dq.empty() && val(dq.back()) <= val(j)) dq.pop_back();
    dq.push_back(j);
    const int c = j - b;
    if (c < 0) continue;
    while (dq.front() < c + a) dq.pop_front();
    out[c] = val(dq.front());
  }
}

// out[x] = max over offsets o in the segments of v[x + o].
std::vector<double> segment_max(const GridSpec& spec, const std::vector<double>& v, const std::vector<Segment>& segs) {
  const int n = spec.n();
  std::vector<double> out(spec.size(), -INFINITY), rowmax(spec.size());
  std::map<std::pair<int, int>, std::vector<int>> by_range;
  for (const auto& s : segs) by_range[{s.lo, s.hi}].push_back(s.o0);
  for (const auto& [range, rows] : by_range) {
    for (int r = 0; r < n; ++r)
      range_max_row(v.data() + static_cast<std::size_t>(r) * n, n, range.first, range.second,
                    rowmax.data() + static_cast<std::size_t>(r) * n);
    for (int x0 = 0; x0 < n; ++x0)
      for (int o0 : rows)
        simd::kernels().vmax(rowmax.data() + static_cast<std::size_t>(spec.wrap(x0 + o0)) * n,
                             out.data() + static_cast<std::size_t>(x0) * n, n);
  }
  return out;
}

void require_beta_range(double beta, int d, const char* who) {
  if (!(beta >= 0.0) || !(2.0 * beta < d))
    throw Error(std::string(who) + ": needs 0 <= 2 beta < d (got beta = " + std::to_string(beta) + ")");
}

}  // namespace

std::vector<double> radius_grid(const GridSpec& spec) {
  const double h = spec.cell();
  const double full = 0.5 * spec.length() * std::sqrt(static_cast<double>(spec.dim()));
  std::vector<double> r{0.5 * h};
  for (int j = 0;; ++j) {
    const double x = h * std::exp2(j / 4.0);
    if (x >= full * (1.0 - kSlack)) break;
    r.push_back(x);
  }
  r.push_back(full);
  return r;
}

double ball_volume(const GridSpec& spec, double r) {
  return static_cast<double>(Window(spec, r).count()) * spec.cell_volume();
}

namespace {

// out[x] = lattice average of w over B(x, r), as the raw sum over the count.
std::vector<double> ball_averages(const Weight& w, double r) {
  const Window win(w.spec(), r);
  if (win.count() == 1) return {w.values().begin(), w.values().end()};
  auto s = window_sum(w.spec(), w.values(), win);
  const double c = static_cast<double>(win.count());
  for (auto& x : s) x /= c;
  return s;
}

}  // namespace

std::vector<double> ball_integrals(const Weight& w, double r) {
  auto s = window_sum(w.spec(), w.values(), Window(w.spec(), r));
  const double hv = w.spec().cell_volume();
  for (auto& x : s) x *= hv;
  return s;
}

Weight hl_maximal(const Weight& w, int k) {
  if (k < 1) throw Error("hl_maximal: iterate count must be at least 1");
  const GridSpec& spec = w.spec();
  Weight cur = w;
  for (int it = 0; it < k; ++it) {
    std::vector<double> out(spec.size(), 0.0);
    for (double r : radius_grid(spec)) {
      fold_max(spec, ball_averages(cur, r), -1.0, out);
    }
    cur = as_weight(spec, std::move(out));
  }
  return cur;
}

Weight fractional_maximal(const Weight& w, double beta) {
  const GridSpec& spec = w.spec();
  require_beta_range(beta, spec.dim(), "fractional_maximal");
  std::vector<double> out(spec.size(), 0.0);
  for (double r : radius_grid(spec)) {
    auto s = ball_integrals(w, r);
    const double f = std::pow(r, 2.0 * beta - spec.dim());
    for (auto& x : s) x *= f;
    fold_max(spec, s, -1.0, out);
  }
  return as_weight(spec, std::move(out));
}

std::array<double, 2> fractional_volume_bounds(const GridSpec& spec) {
  std::array<double, 2> b{INFINITY, 0.0};
  for (double r : radius_grid(spec)) {
    const double q = ball_volume(spec, r) / std::pow(r, spec.dim());
    b[0] = std::min(b[0], q);
    b[1] = std::max(b[1], q);
  }
  return b;
}

std::vector<double> admissible_radii(const GridSpec& spec, double alpha) {
  std::vector<double> out;
  for (double r : radius_grid(spec))
    if (admissible(r, alpha)) out.push_back(r);
  return out;
}

namespace {

Weight ball_region_sup(const Weight& w, const std::vector<double>& radii, double beta,
                       const std::function<double(double)>& reach) {
  const GridSpec& spec = w.spec();
  std::vector<double> out(spec.size(), 0.0);
  for (double r : radii) {
    auto s = ball_averages(w, r);
    const double f = std::pow(r, 2.0 * beta);
    for (auto& x : s) x *= f;
    fold_max(spec, s, reach(r), out);
  }
  return as_weight(spec, std::move(out));
}

}  // namespace

Weight subdyadic_maximal(const Weight& w, double alpha, double beta) {
  const auto radii = admissible_radii(w.spec(), alpha);
  if (radii.empty()) throw Error("subdyadic_maximal: no grid radius satisfies r^alpha <= 1; enlarge the box");
  return ball_region_sup(w, radii, beta, [alpha](double r) { return std::pow(r, 1.0 - alpha); });
}

Weight global_maximal(const Weight& w, double alpha, double beta, double s) {
  require_beta_range(beta, w.spec().dim(), "global_maximal");
  if (!(s > 0.0)) throw Error("global_maximal: s must be positive");
  return ball_region_sup(w, radius_grid(w.spec()), beta, [alpha, s](double r) { return s * std::pow(r, 1.0 - alpha); });
}

Weight inhomogeneous_maximal(const Weight& w, double alpha, double beta, double s) {
  if (alpha == 0.0) throw Error("inhomogeneous_maximal: alpha = 0 leaves s^{1/alpha} undefined");
  if (!(s > 0.0)) throw Error("inhomogeneous_maximal: s must be positive");
  const GridSpec& spec = w.spec();
  const double dil = std::pow(s, 1.0 / alpha);
  std::vector<double> out(spec.size(), 0.0);
  bool any = false;
  for (double r : radius_grid(spec)) {
    if (r > 1.0 + kSlack) continue;
    any = true;
    const double rho = dil * r;
    auto v = ball_averages(w, rho);
    const double f = std::pow(r, 2.0 * beta);
    for (auto& x : v) x *= f;
    fold_max(spec, v, dil * std::pow(r, 1.0 - alpha), out);
  }
  if (!any) throw Error("inhomogeneous_maximal: no grid radius r <= 1; refine the grid");
  return as_weight(spec, std::move(out));
}

// ---------------------------------------------------------------------------
// Tubes

bool tube_contains(const GridSpec& spec, double r, double length, double angle, int o0, int o1) {
  const double h = spec.cell();
  const double c = std::cos(angle), s = std::sin(angle);
  const double along = (o0 * c + o1 * s) * h;
  const double across = (-o0 * s + o1 * c) * h;
  return std::abs(along) <= 0.5 * length * (1.0 + kSlack) && std::abs(across) <= r * (1.0 + kSlack);
}

std::vector<double> tube_angles(double r, double alpha) {
  const double want = std::ceil(kPi * std::pow(r, -alpha) - kSlack);
  const int n = static_cast<int>(std::clamp(want, 1.0, static_cast<double>(kMaxTubeAngles)));
  std::vector<double> a(n);
  for (int k = 0; k < n; ++k) a[k] = kPi * k / n;
  return a;
}

Weight nikodym_maximal(const Weight& w, double alpha, double beta) {
  const GridSpec& spec = w.spec();
  if (spec.dim() != 2) throw Error("nikodym_maximal: tubes need d = 2 (in d = 1 they are intervals, i.e. balls)");
  if (alpha == 0.0) throw Error("nikodym_maximal: alpha = 0 gives round tubes; use subdyadic_maximal");
  const auto radii = admissible_radii(spec, alpha);
  if (radii.empty()) throw Error("nikodym_maximal: no grid radius satisfies r^alpha <= 1");
  const int n = spec.n();
  const PrefixRows pre(w);
  std::vector<double> out(spec.size(), 0.0), v(spec.size());
  for (double r : radii) {
    const double length = std::pow(r, 1.0 - alpha);
    const double f = std::pow(r, 2.0 * beta);
    for (double angle : tube_angles(r, alpha)) {
      std::size_t count = 0;
      const auto segs = tube_segments(spec, r, length, angle, count);
      std::fill(v.begin(), v.end(), 0.0);
      for (int x0 = 0; x0 < n; ++x0) {
        double* o = v.data() + static_cast<std::size_t>(x0) * n;
        for (const auto& s : segs) {
          const int row = spec.wrap(x0 + s.o0);
          for (int c = 0; c < n; ++c) o[c] += pre.range(row, c, s.lo, s.hi);
        }
      }
      for (auto& x : v) x = f * (x / static_cast<double>(count));
      // x lies in the tube centred at c iff c = x - o for an offset o of the tube
      std::vector<Segment> refl;
      refl.reserve(segs.size());
      for (const auto& s : segs) refl.push_back({-s.o0, -s.hi, -s.lo});
      const auto m = segment_max(spec, v, refl);
      simd::kernels().vmax(m.data(), out.data(), out.size());
    }
  }
  return as_weight(spec, std::move(out));
}

Weight nikodym_maximal(const GridFunction& f, double alpha, double beta) {
  return nikodym_maximal(Weight::modulus(f), alpha, beta);
}

double nikodym_chain_constant(const GridSpec& spec, double alpha) {
  double c = 0.0;
  for (double r : admissible_radii(spec, alpha)) {
    const double length = std::pow(r, 1.0 - alpha);
    // two rows of balls on a square lattice of spacing sqrt(2) r cover a strip of width 2r
    const double balls = 2.0 * (std::ceil(length / (std::sqrt(2.0) * r)) + 1.0);
    double tmin = INFINITY;
    for (double angle : tube_angles(r, alpha)) {
      std::size_t count = 0;
      tube_segments(spec, r, length, angle, count);
      tmin = std::min(tmin, static_cast<double>(count) * spec.cell_volume());
    }
    c = std::max(c, balls * ball_volume(spec, r) / tmin);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Averages

namespace {

void require_average_radius(const GridSpec& spec, double t, const char* who) {
  if (!(t >= spec.cell() * (1.0 - kSlack)) || !(t <= 0.5 * spec.length() * (1.0 + kSlack)))
    throw Error(std::string(who) + ": radius must lie between one cell and L/2");
}

std::vector<double> sup_radii(const GridSpec& spec, double t) {
  std::vector<double> r{t};
  for (double x : radius_grid(spec))
    if (x > t) r.push_back(x);
  return r;
}

}  // namespace

Weight scale_average(const Weight& w, double t) {
  require_average_radius(w.spec(), t, "scale_average");
  return as_weight(w.spec(), ball_averages(w, t));
}

Weight running_sup_average(const Weight& w, double t) {
  require_average_radius(w.spec(), t, "running_sup_average");
  const GridSpec& spec = w.spec();
  std::vector<double> out(spec.size(), 0.0);
  for (double r : sup_radii(spec, t)) {
    fold_max(spec, ball_averages(w, r), -1.0, out);
  }
  return as_weight(spec, std::move(out));
}

double running_sup_constant(const GridSpec& spec, double t) {
  require_average_radius(spec, t, "running_sup_constant");
  const auto grid = radius_grid(spec);
  double c = 0.0;
  for (double r : sup_radii(spec, t)) {
    double big = grid.back();
    for (double x : grid)
      if (x >= r + t) {
        big = x;
        break;
      }
    c = std::max(c, ball_volume(spec, big) / ball_volume(spec, r));
  }
  return c;
}

// ---------------------------------------------------------------------------
// Regularised averages

RadialProfile RadialProfile::standard() {
  return {"plateau", [](double rho) { return cutoff::ramp_down(rho, 1.0, 2.0); }, 2.0};
}

void RadialProfile::validate() const {
  if (!fn) throw Error("RadialProfile: empty profile");
  if (!(support >= 1.0)) throw Error("RadialProfile '" + label + "': support must contain the unit ball");
  constexpr int n = 4000;
  for (int i = 0; i <= n; ++i) {
    const double rho = 2.0 * support * i / n;
    const double v = fn(rho);
    if (!std::isfinite(v) || v < 0.0)
      throw Error("RadialProfile '" + label + "': negative or non-finite at |x| = " + std::to_string(rho));
    if (rho <= 1.0 && v <= 0.0)
      throw Error("RadialProfile '" + label + "': vanishes inside the unit ball at |x| = " + std::to_string(rho));
    if (rho > support * (1.0 + kSlack) && v != 0.0)
      throw Error("RadialProfile '" + label + "': nonzero outside the declared support");
  }
}

double RadialProfile::sup() const {
  double m = 0.0;
  constexpr int n = 4000;
  for (int i = 0; i <= n; ++i) m = std::max(m, fn(support * i / n));
  return m;
}

double RadialProfile::lattice_l1(const GridSpec& spec, double r) const {
  const double hv = spec.cell_volume(), scale = std::pow(r, -spec.dim());
  double s = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    auto idx = spec.axis_indices(i);
    const double o0 = spec.min_image(idx[0]), o1 = spec.dim() == 2 ? spec.min_image(idx[1]) : 0;
    s += hv * scale * fn(std::hypot(o0, o1) * spec.cell() / r);
  }
  return s;
}

Weight regularised_maximal(const Weight& w, double alpha, double beta, const RadialProfile& profile) {
  profile.validate();
  const GridSpec& spec = w.spec();
  const auto radii = admissible_radii(spec, alpha);
  if (radii.empty()) throw Error("regularised_maximal: no grid radius satisfies r^alpha <= 1");
  const std::vector<double> vals(w.values().begin(), w.values().end());
  const double hv = spec.cell_volume();
  std::vector<double> out(spec.size(), 0.0), conv;
  for (double r : radii) {
    const double scale = hv * std::pow(r, -spec.dim());
    const auto khat = detail::kernel_transform(
        spec, [&](double a, double b) { return cplx(scale * profile.fn(std::hypot(a, b) / r)); });
    detail::convolve(spec, khat, vals, conv);
    const double f = std::pow(r, 2.0 * beta);
    for (auto& x : conv) x *= f;
    fold_max(spec, conv, std::pow(r, 1.0 - alpha), out);
  }
  return as_weight(spec, std::move(out));
}

double regularised_domination_constant(const GridSpec& spec, double alpha, const RadialProfile& profile) {
  profile.validate();
  double c = INFINITY;
  const int d = spec.dim();
  for (double r : admissible_radii(spec, alpha)) {
    const Window win(spec, r);
    double pmin = INFINITY;
    const auto rows = win.row_offsets();
    const auto widths = win.half_widths();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const int wmax = std::min(widths[i], spec.n() / 2);
      for (int o1 = -wmax; o1 <= wmax; ++o1) {
        const double o = d == 1 ? std::abs(o1) : std::hypot(rows[i], o1);
        pmin = std::min(pmin, profile.fn(o * spec.cell() / r));
      }
    }
    c = std::min(c, pmin * std::pow(r, -d) * ball_volume(spec, r));
  }
  return c;
}

// ---------------------------------------------------------------------------
// Operator-norm trends

std::string OpnormReport::to_json() const {
  nlohmann::ordered_json j;
  j["p"] = p;
  j["q"] = q;
  j["alpha"] = alpha;
  j["beta"] = beta;
  j["sizes"] = sizes;
  j["norms"] = norms;
  j["verdict"] = verdict;
  j["fitted_exponent"] = fitted_exponent;
  return j.dump(2);
}

std::vector<GridSpec> opnorm_boxes(int dim, double alpha, double h0, double min_length, int levels) {
  if (levels < 1 || !(h0 > 0.0)) throw Error("opnorm_boxes: need h0 > 0 and at least one level");
  std::vector<GridSpec> out;
  for (int k = 0; k < levels; ++k) {
    const double h = h0 * std::exp2(-k);
    const double want = std::max(min_length, 4.0 * std::pow(h, 1.0 - alpha));
    const int n = 1 << static_cast<int>(std::ceil(std::log2(want / h) - kSlack));
    out.emplace_back(dim, n, n * h);
  }
  return out;
}

void OpnormReport::classify() {
  if (norms.empty()) throw Error("OpnormReport: no norms");
  if (sizes.size() != norms.size()) throw Error("OpnormReport: sizes and norms differ in count");
  // Slope over the last three levels: the early boxes can be pre-asymptotic.
  const std::size_t m = norms.size();
  const std::size_t first = m > 3 ? m - 3 : 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = first; i < m; ++i) {
    const double x = std::log(static_cast<double>(sizes[i])), y = std::log(std::max(norms[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(m - first);
  const double den = k * sxx - sx * sx;
  fitted_exponent = den > 0.0 ? (k * sxy - sx * sy) / den : 0.0;

  bool bounded = fitted_exponent <= kGrowthSlope;
  double run = norms[0];
  for (double v : norms) {
    if (v > kGrowthJump * run) bounded = false;
    run = std::max(run, v);
  }
  verdict = bounded ? "bounded" : "growing";
}

OpnormReport empirical_opnorm(const WeightOperator& op, double p, double q, const CorpusFactory& corpus,
                              const std::vector<GridSpec>& boxes, double alpha, double beta) {
  if (!(p > 1.0) || !(q >= p)) throw Error("empirical_opnorm: needs 1 < p <= q <= infinity");
  if (boxes.empty()) throw Error("empirical_opnorm: no box sizes");
  OpnormReport rep;
  rep.p = p;
  rep.q = q;
  rep.alpha = alpha;
  rep.beta = beta;
  for (const auto& spec : boxes) {
    const auto ws = corpus(spec);
    if (ws.empty()) throw Error("empirical_opnorm: empty corpus");
    double best = 0.0;
    for (const auto& w : ws) {
      const double den = lp_norm(w, p);
      if (den == 0.0) continue;
      best = std::max(best, lp_norm(op(w), q) / den);
    }
    rep.sizes.push_back(spec.n());
    rep.norms.push_back(best);
  }
  rep.classify();
  return rep;
}

}  // namespace subdyadic
