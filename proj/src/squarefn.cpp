#include "subdyadic/squarefn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "subdyadic/cutoff.hpp"
#include "subdyadic/simd.hpp"
#include "subdyadic/window.hpp"
#include "convolution.hpp"

namespace subdyadic {

namespace {

using detail::convolve;
using detail::kernel_transform;

constexpr double kProfileSharpness = 2.5;

double log_bump(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return std::exp(-kProfileSharpness / (s * (1.0 - s)));
}

// Trapezoid on [0, 1]; the integrand is flat to all orders at both ends.
template <typename F>
double unit_integral(F f) {
  constexpr int n = 20000;
  double s = 0.0;
  for (int i = 1; i < n; ++i) s += f(static_cast<double>(i) / n);
  return s / n;
}

std::vector<double> norms_of(const GridSpec& spec) {
  std::vector<double> r(spec.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = spec.frequency_norm(i);
  return r;
}

void check_region(const ScaleGrid& grid, double alpha, const char* who) {
  if (grid.t.empty()) throw Error(std::string(who) + ": empty scale grid");
  for (double t : grid.t)
    if (std::pow(t, alpha) > 1.0 + 1e-12) throw Error(std::string(who) + ": scale grid violates t^alpha <= 1");
}

// Energies |f * phi_t|^2 per node, computed from one spectrum.
class PieceEngine {
 public:
  PieceEngine(const Spectrum& fhat, const AnalyzingFunction& phi)
      : spec_(fhat.spec), fhat_(fhat), rho_(norms_of(spec_)), phi_(phi), mult_(spec_.size()) {}

  // false when phi_hat(t|xi|) vanishes on every occupied mode
  bool energy(double t, std::vector<double>& out) {
    bool any = false;
    for (std::size_t i = 0; i < mult_.size(); ++i) {
      mult_[i] = phi_(t * rho_[i]);
      any = any || (mult_[i] != 0.0 && fhat_.coeffs[i] != 0.0);
    }
    if (!any) return false;
    buf_.resize(spec_.size());
    const auto& k = simd::kernels();
    k.cmul_real(fhat_.coeffs.data(), mult_.data(), buf_.data(), buf_.size());
    fft_inplace(spec_, buf_, true);
    out.resize(spec_.size());
    k.abs2(buf_.data(), out.data(), out.size());
    return true;
  }

  const GridSpec& spec() const { return spec_; }

 private:
  GridSpec spec_;
  Spectrum fhat_;
  std::vector<double> rho_;
  const AnalyzingFunction& phi_;
  std::vector<double> mult_;
  std::vector<cplx> buf_;
};

double node_weight(const GridSpec& spec, const ScaleGrid& grid, double t, double alpha, double beta) {
  return spec.cell_volume() * grid.log_ratio * std::pow(t, -(1.0 - alpha) * spec.dim() - 2.0 * beta);
}

Weight finish(const GridSpec& spec, std::vector<double> acc) {
  for (auto& v : acc) v = std::sqrt(std::max(v, 0.0));
  return Weight(spec, std::move(acc));
}

}  // namespace

// ---------------------------------------------------------------------------

AnalyzingFunction::AnalyzingFunction(double alpha) : lo_(alpha >= 0.0 ? 1.0 : 0.5) {
  const double b1 = unit_integral(log_bump);
  const double b2 = unit_integral([](double s) { return log_bump(s) * log_bump(s); });
  c_ = 1.0 / (std::log(2.0) * b1);
  kappa2_ = c_ * c_ * std::log(2.0) * b2;
}

double AnalyzingFunction::operator()(double rho) const {
  if (rho <= lo_ || rho >= 2.0 * lo_) return 0.0;
  return c_ * log_bump(std::log2(rho / lo_));
}

ScaleGrid make_scale_grid(const AnalyzingFunction& phi, double alpha, double band_lo, double band_hi, int per_octave,
                          bool restrict_region) {
  if (!(band_lo > 0.0) || !(band_hi >= band_lo)) throw Error("make_scale_grid: band must satisfy 0 < lo <= hi");
  if (per_octave < 1) throw Error("make_scale_grid: need at least one node per octave");
  ScaleGrid g;
  g.ratio = std::pow(2.0, 1.0 / per_octave);
  g.log_ratio = std::log(2.0) / per_octave;
  const int j_lo = static_cast<int>(std::floor(per_octave * std::log2(phi.support_lo() / band_hi)));
  const int j_hi = static_cast<int>(std::ceil(per_octave * std::log2(phi.support_hi() / band_lo)));
  for (int j = j_lo; j <= j_hi; ++j) {
    if (restrict_region && alpha > 0.0 && j > 0) continue;
    if (restrict_region && alpha < 0.0 && j < 0) continue;
    g.t.push_back(std::pow(2.0, static_cast<double>(j) / per_octave));
  }
  return g;
}

std::array<double, 2> spectral_band(const Spectrum& s, double tol) {
  double mx = 0.0;
  for (const auto& c : s.coeffs) mx = std::max(mx, std::abs(c));
  std::array<double, 2> band{INFINITY, 0.0};
  if (mx == 0.0) return {0.0, 0.0};
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
    if (std::abs(s.coeffs[i]) <= tol * mx) continue;
    const double r = s.spec.frequency_norm(i);
    band[0] = std::min(band[0], r);
    band[1] = std::max(band[1], r);
  }
  return band;
}

bool ApproachRegion::contains(double distance, double t) const {
  const double r = reach(t);
  return r >= 0.0 && distance <= r * (1.0 + 1e-12);
}

double ApproachRegion::reach(double t) const {
  if (!(t > 0.0)) return -1.0;
  switch (kind) {
    case Kind::gamma:
      return std::pow(t, alpha) <= 1.0 + 1e-12 ? std::pow(t, 1.0 - alpha) : -1.0;
    case Kind::lambda_s:
      return s * std::pow(t, 1.0 - alpha);
    case Kind::gamma_s:
      if (alpha == 0.0) throw Error("ApproachRegion: gamma_s needs alpha != 0");
      return t <= 1.0 + 1e-12 ? std::pow(s, 1.0 / alpha) * std::pow(t, 1.0 - alpha) : -1.0;
  }
  return -1.0;
}

double DecayKernel::operator()(double x_norm) const {
  return std::pow(t, (alpha - 1.0) * dim) * std::pow(1.0 + std::pow(t, alpha - 1.0) * x_norm, -dim * lambda);
}

double DecayKernel::self_convolution_ratio(const GridSpec& spec) const {
  auto khat = kernel_transform(spec, [this](double a, double b) { return cplx((*this)(std::hypot(a, b))); });
  std::vector<double> k(spec.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    auto idx = spec.axis_indices(i);
    k[i] = (*this)(spec.cell() * std::hypot(spec.min_image(idx[0]), spec.dim() == 2 ? spec.min_image(idx[1]) : 0));
  }
  std::vector<double> conv;
  convolve(spec, khat, k, conv);
  double worst = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) worst = std::max(worst, conv[i] * spec.cell_volume() / k[i]);
  return worst;
}

// ---------------------------------------------------------------------------

GridFunction littlewood_paley_piece(const Spectrum& fhat, const AnalyzingFunction& phi, double t) {
  if (!(t > 0.0)) throw Error("littlewood_paley_piece: t must be positive");
  std::vector<double> m(fhat.coeffs.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = phi(t * fhat.spec.frequency_norm(i));
  std::vector<cplx> data(m.size());
  simd::kernels().cmul_real(fhat.coeffs.data(), m.data(), data.data(), data.size());
  fft_inplace(fhat.spec, data, true);
  return GridFunction(fhat.spec, std::move(data));
}

GridFunction littlewood_paley_piece(const GridFunction& f, const AnalyzingFunction& phi, double t) {
  return littlewood_paley_piece(forward_transform(f), phi, t);
}

Weight g_alpha_beta(const GridFunction& f, double alpha, double beta, const AnalyzingFunction& phi,
                    const ScaleGrid& grid) {
  return g_alpha_beta(forward_transform(f), alpha, beta, phi, grid);
}

Weight g_alpha_beta(const Spectrum& f, double alpha, double beta, const AnalyzingFunction& phi,
                    const ScaleGrid& grid) {
  check_region(grid, alpha, "g_alpha_beta");
  const GridSpec& spec = f.spec;
  bool resolved = false;
  for (double t : grid.t) resolved = resolved || std::pow(t, 1.0 - alpha) >= spec.cell();
  if (!resolved) throw Error("g_alpha_beta: approach region is below one cell at every scale; use a finer grid");
  PieceEngine eng(f, phi);
  std::vector<double> acc(spec.size(), 0.0), e;
  const auto& k = simd::kernels();
  for (double t : grid.t) {
    if (!eng.energy(t, e)) continue;
    const Window win(spec, std::pow(t, 1.0 - alpha));
    const auto s = window_sum(spec, e, win);
    k.axpy(node_weight(spec, grid, t, alpha, beta), s.data(), acc.data(), acc.size());
  }
  return finish(spec, std::move(acc));
}

Weight g_star(const GridFunction& f, double alpha, double beta, double lambda, const AnalyzingFunction& phi,
              const ScaleGrid& grid) {
  if (!(lambda > 0.0)) throw Error("g_star: lambda must be positive");
  check_region(grid, alpha, "g_star");
  const GridSpec& spec = f.spec();
  PieceEngine eng(forward_transform(f), phi);
  std::vector<double> acc(spec.size(), 0.0), e, conv;
  const auto& k = simd::kernels();
  const int d = spec.dim();
  for (double t : grid.t) {
    if (!eng.energy(t, e)) continue;
    const double reach = std::pow(t, 1.0 - alpha);
    const auto khat = kernel_transform(
        spec, [&](double a, double b) { return cplx(std::pow(1.0 + std::hypot(a, b) / reach, -d * lambda)); });
    convolve(spec, khat, e, conv);
    k.axpy(node_weight(spec, grid, t, alpha, beta), conv.data(), acc.data(), acc.size());
  }
  return finish(spec, std::move(acc));
}

// ---------------------------------------------------------------------------

AuxProfile::AuxProfile(int dim, double halfwidth) : dim_(dim), halfwidth_(halfwidth) {
  if (dim != 1 && dim != 2) throw Error("AuxProfile: dimension must be 1 or 2");
  // Phi_hat is supported in the box of half-width 2 * halfwidth
  if (!(halfwidth > 0.0) || 2.0 * halfwidth * std::sqrt(static_cast<double>(dim)) > 1.0 + 1e-12)
    throw Error("AuxProfile: Fourier support of Phi must lie in the unit ball");
  constexpr int n = 1024;
  theta0_ = 0.0;
  for (int i = 0; i < n; ++i) {
    const double xi = halfwidth * (i + 0.5) / n;
    nodes_.push_back(xi);
    weights_.push_back(2.0 * halfwidth / n * (1.0 - cutoff::smooth_step(xi / halfwidth)));
    theta0_ += weights_.back();
  }
  lower_ = INFINITY;
  if (dim == 1) {
    lower_ = std::min((*this)({1.0, 0.0}), (*this)({0.0, 0.0}));
  } else {
    for (int i = 0; i < 4096; ++i) {
      const double a = kTwoPi * i / 4096;
      lower_ = std::min(lower_, (*this)({std::cos(a), std::sin(a)}));
    }
  }
}

double AuxProfile::theta(double x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) s += weights_[i] * std::cos(x * nodes_[i]);
  return s / theta0_;
}

double AuxProfile::operator()(const Point& x) const {
  const double a = theta(x[0]);
  const double b = dim_ == 2 ? theta(x[1]) : 1.0;
  return a * a * b * b;
}

double AuxProfile::upper_constant(double lambda) const {
  // theta decays faster than any power; the sup sits at moderate |x|
  double best = 0.0;
  const int angles = dim_ == 1 ? 1 : 64;
  for (int j = 0; j < angles; ++j) {
    const double a = dim_ == 1 ? 0.0 : 0.5 * kPi * j / (angles - 1);
    for (double r = 0.0; r <= 400.0; r += (r < 60.0 ? 0.02 : 0.5)) {
      const Point x{r * std::cos(a), r * std::sin(a)};
      best = std::max(best, (*this)(x) * std::pow(1.0 + r, dim_ * lambda));
    }
  }
  // sampled supremum; 1% margin for points between samples
  return 1.01 * best;
}

Weight g_phi_aux(const GridFunction& f, double alpha, double beta, const AuxProfile& profile,
                 const AnalyzingFunction& phi, const ScaleGrid& grid) {
  check_region(grid, alpha, "g_phi_aux");
  const GridSpec& spec = f.spec();
  if (profile.dim() != spec.dim()) throw Error("g_phi_aux: profile dimension mismatch");
  PieceEngine eng(forward_transform(f), phi);
  std::vector<double> acc(spec.size(), 0.0), e, conv, axis(spec.n());
  const auto& k = simd::kernels();
  for (double t : grid.t) {
    if (!eng.energy(t, e)) continue;
    const double reach = std::pow(t, 1.0 - alpha);
    // Phi is a product of squares of theta; tabulate theta once per axis offset
    for (int i = 0; i < spec.n(); ++i) {
      const double th = profile.theta(spec.min_image(i) * spec.cell() / reach);
      axis[i] = th * th;
    }
    const auto khat = kernel_transform(spec, [&](double a, double b) {
      const int i0 = spec.wrap(static_cast<int>(std::lround(a / spec.cell())));
      const int i1 = spec.wrap(static_cast<int>(std::lround(b / spec.cell())));
      return cplx(axis[i0] * (spec.dim() == 2 ? axis[i1] : 1.0));
    });
    convolve(spec, khat, e, conv);
    k.axpy(node_weight(spec, grid, t, alpha, beta), conv.data(), acc.data(), acc.size());
  }
  return finish(spec, std::move(acc));
}

Weight s_phi(const GridFunction& f, const AnalyzingFunction& phi, const ScaleGrid& grid) {
  const GridSpec& spec = f.spec();
  const Spectrum fh = forward_transform(f);
  const auto band = spectral_band(fh);
  if (band[1] > 0.0) {
    if (band[0] == 0.0) throw Error("s_phi: f has a zero-frequency component the scale grid cannot cover");
    if (grid.t.empty() || grid.t.front() > phi.support_lo() / band[1] * (1.0 + 1e-12) ||
        grid.t.back() < phi.support_hi() / band[0] * (1.0 - 1e-12))
      throw Error("s_phi: scale grid does not cover the band of f");
  }
  PieceEngine eng(fh, phi);
  std::vector<double> acc(spec.size(), 0.0), e;
  for (double t : grid.t) {
    if (!eng.energy(t, e)) continue;
    simd::kernels().axpy(grid.log_ratio, e.data(), acc.data(), acc.size());
  }
  return finish(spec, std::move(acc));
}

void write_energy_profile(std::ostream& os, const GridFunction& f, double beta, const AnalyzingFunction& phi,
                          const ScaleGrid& grid) {
  const Spectrum fh = forward_transform(f);
  os << "t,value\n";
  char buf[96];
  for (double t : grid.t) {
    const double e = std::pow(lp_norm(littlewood_paley_piece(fh, phi, t), 2.0), 2.0) * std::pow(t, -2.0 * beta);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t, e);
    os << buf;
  }
}

}  // namespace subdyadic
