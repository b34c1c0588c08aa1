#include "subdyadic/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "json.hpp"
#include "subdyadic/cutoff.hpp"

namespace subdyadic {

namespace {

constexpr double kRegionTol = 1e-12;

double norm(const Point& xi) { return std::hypot(xi[0], xi[1]); }

template <typename Fn>
GridFunction radial_multiply(const GridFunction& f, Fn factor) {
  Spectrum s = forward_transform(f);
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) s.coeffs[i] *= factor(i, s.spec.frequency_norm(i));
  return inverse_transform(s);
}

void check_band(const CheckOptions& opt, double alpha, bool outer, const char* what) {
  auto side = [&](double rho) {
    const double v = std::pow(rho, alpha);
    return outer ? v >= 1.0 - kRegionTol : v <= 1.0 + kRegionTol;
  };
  if (!(opt.rho_min > 0.0 && opt.rho_min <= opt.rho_max) || !side(opt.rho_min) || !side(opt.rho_max))
    throw Error(std::string("twoside_check: ") + what + " band leaves its region");
}

// m with its support cut down to one side of |xi|^alpha = 1, so ball nodes
// that stray across the boundary are skipped.
Symbol restrict_to_region(const Symbol& m, double alpha, bool outer) {
  Symbol r = m;
  auto base = m.support;
  r.support = [base, alpha, outer](const Point& xi) {
    if (base && !base(xi)) return false;
    const double rho = norm(xi);
    if (rho == 0.0) return false;
    const double v = std::pow(rho, alpha);
    return outer ? v >= 1.0 - kRegionTol : v <= 1.0 + kRegionTol;
  };
  return r;
}

}  // namespace

const char* variant_name(ModelVariant v) {
  switch (v) {
    case ModelVariant::homogeneous: return "homogeneous";
    case ModelVariant::two_sided: return "two_sided";
    case ModelVariant::inhomogeneous: return "inhomogeneous";
  }
  return "?";
}

ModelVariant parse_variant(const std::string& name) {
  for (auto v : {ModelVariant::homogeneous, ModelVariant::two_sided, ModelVariant::inhomogeneous})
    if (name == variant_name(v)) return v;
  throw Error("unknown model variant '" + name + "'");
}

bool in_outer_region(double rho, double alpha) { return rho > 0.0 && std::pow(rho, alpha) >= 1.0 - kRegionTol; }

Symbol model_symbol(double alpha, double beta, ModelVariant variant) {
  const std::string label = std::string("model_") + variant_name(variant);
  switch (variant) {
    case ModelVariant::homogeneous:
    case ModelVariant::two_sided: {
      auto prof = [alpha, beta](double rho) { return std::polar(std::pow(rho, -beta), std::pow(rho, alpha)); };
      if (variant == ModelVariant::two_sided) return Symbol::radial(label, prof, [](double rho) { return rho > 0.0; });
      return Symbol::radial(label, prof, [alpha](double rho) { return in_outer_region(rho, alpha); });
    }
    case ModelVariant::inhomogeneous: {
      Symbol s = Symbol::radial(label, [alpha, beta](double rho) {
        const double phase = rho == 0.0 ? (alpha > 0.0 ? 0.0 : std::nan("")) : std::pow(rho, alpha);
        return std::polar(std::pow(1.0 + rho * rho, -beta / 2.0), phase);
      });
      s.defined_at_zero = alpha > 0.0;
      return s;
    }
  }
  throw Error("model_symbol: bad variant");
}

std::string model_descriptor(double alpha, double beta, ModelVariant variant) {
  nlohmann::ordered_json j;
  j["variant"] = variant_name(variant);
  j["alpha"] = alpha;
  j["beta"] = beta;
  return j.dump();
}

std::string TwoSidedReport::to_json() const {
  nlohmann::ordered_json j;
  j["outer"] = nlohmann::ordered_json::parse(outer.to_json());
  j["inner"] = nlohmann::ordered_json::parse(inner.to_json());
  j["constant"] = constant();
  return j.dump(2);
}

TwoSidedReport twoside_check(const Symbol& m, double alpha, double beta, const CheckOptions& outer,
                             const CheckOptions& inner) {
  if (alpha == 0.0) throw Error("twoside_check: alpha = 0 has no inner region");
  check_band(outer, alpha, true, "outer");
  check_band(inner, alpha, false, "inner");
  TwoSidedReport r;
  r.outer = miyachi_check(restrict_to_region(m, alpha, true), alpha, beta, outer);
  r.inner = miyachi_check(restrict_to_region(m, alpha, false), 0.0, beta, inner);
  r.inner.condition = "twoside_inner";
  r.inner.alpha = alpha;
  return r;
}

double split_cutoff(double rho, double alpha) {
  if (rho == 0.0) return alpha > 0.0 ? 0.0 : 1.0;
  return 1.0 - cutoff::plateau(std::pow(rho, alpha));
}

SplitSymbol split_multiplier(const Symbol& m, double alpha) {
  if (alpha == 0.0) throw Error("split_multiplier: alpha must be nonzero");
  SplitSymbol out;
  auto base_support = m.support;
  out.high.label = m.label + "_high";
  out.high.eval = [m, alpha](const Point& xi) {
    const double phi = split_cutoff(norm(xi), alpha);
    return phi == 0.0 ? cplx(0.0) : phi * m.eval(xi);
  };
  out.high.support = [base_support, alpha](const Point& xi) {
    return (!base_support || base_support(xi)) && in_outer_region(norm(xi), alpha);
  };
  out.high.defined_at_zero = alpha > 0.0;

  // m - phi m written as (1 - phi) m so the two pieces add back exactly.
  out.low.label = m.label + "_low";
  out.low.eval = [m, alpha](const Point& xi) {
    const double keep = 1.0 - split_cutoff(norm(xi), alpha);
    return keep == 0.0 ? cplx(0.0) : keep * m.eval(xi);
  };
  out.low.support = [base_support, alpha](const Point& xi) {
    return (!base_support || base_support(xi)) && std::pow(norm(xi), alpha) <= 2.0 + kRegionTol;
  };
  out.low.defined_at_zero = m.defined_at_zero;
  return out;
}

// ---------------------------------------------------------------------------

void OscKernelParams::validate() const {
  if (dim != 1 && dim != 2) throw Error("oscillatory kernel: dim must be 1 or 2");
  if (!(a > 0.0)) throw Error("oscillatory kernel: a must be positive");
  if (a == 1.0) throw Error("oscillatory kernel: a = 1 has no dual exponent");
  if (b < dim * (1.0 - a / 2.0) - 1e-12) throw Error("oscillatory kernel: b below d(1 - a/2)");
}

std::string OscKernelParams::to_json() const {
  nlohmann::ordered_json j;
  j["a"] = a;
  j["b"] = b;
  j["dim"] = dim;
  j["alpha"] = alpha();
  j["beta"] = beta();
  return j.dump();
}

double OscillatoryKernel::eta(double r) { return cutoff::plateau(2.0 * r); }

cplx OscillatoryKernel::profile(double r) const {
  const double cut = 1.0 - eta(r);
  if (cut == 0.0) return 0.0;
  return std::polar(cut * std::pow(r, -params_.b), std::pow(r, params_.a));
}

OscillatoryKernel::OscillatoryKernel(OscKernelParams params, GridSpec spec)
    : OscillatoryKernel(params, spec, 0.25 * spec.length(), 0.45 * spec.length()) {}

OscillatoryKernel::OscillatoryKernel(OscKernelParams params, GridSpec spec, double window_lo, double window_hi)
    : params_(params), spec_(spec), lo_(window_lo), hi_(window_hi), samples_(GridFunction::zeros(spec)) {
  params_.validate();
  if (spec.dim() != params_.dim) throw Error("oscillatory kernel: grid dimension mismatch");
  if (!(1.0 < lo_ && lo_ < hi_ && hi_ < spec.length() / 2.0))
    throw Error("oscillatory kernel: window must satisfy 1 < lo < hi < L/2");
  // Local frequency a r^{a-1} of the phase, largest at r = 1/2 or r = hi.
  const double local = params_.a * std::max(std::pow(0.5, params_.a - 1.0), std::pow(hi_, params_.a - 1.0));
  if (local >= spec.nyquist()) throw Error("oscillatory kernel: phase is not resolved by the grid");

  std::vector<cplx> vals(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto ai = spec.axis_indices(i);
    const double x0 = spec.min_image(ai[0]) * spec.cell();
    const double x1 = spec.dim() == 2 ? spec.min_image(ai[1]) * spec.cell() : 0.0;
    const double r = std::hypot(x0, x1);
    const double win = cutoff::ramp_down(r, lo_, hi_);
    if (win == 0.0) continue;
    const cplx v = win * profile(r);
    if (v == cplx(0.0)) continue;
    vals[i] = v;
    pos0_.push_back(x0);
    pos1_.push_back(x1);
    nonzero_.push_back(v);
  }
  samples_ = GridFunction(spec, std::move(vals));
}

std::vector<cplx> OscillatoryKernel::lattice_symbol() const {
  Spectrum s = forward_transform(samples_);
  const double scale = spec_.cell_volume() * std::pow(static_cast<double>(spec_.n()), spec_.dim() / 2.0);
  for (auto& c : s.coeffs) c *= scale;
  return std::move(s.coeffs);
}

cplx OscillatoryKernel::transform(const Point& xi) const {
  cplx acc = 0.0;
  for (std::size_t k = 0; k < nonzero_.size(); ++k)
    acc += nonzero_[k] * std::polar(1.0, -(pos0_[k] * xi[0] + pos1_[k] * xi[1]));
  return spec_.cell_volume() * acc;
}

Symbol OscillatoryKernel::symbol() const {
  Symbol s;
  s.label = "oscillatory_kernel";
  auto self = std::make_shared<OscillatoryKernel>(*this);
  s.eval = [self](const Point& xi) { return self->transform(xi); };
  s.defined_at_zero = true;
  return s;
}

double OscillatoryKernel::window_perturbation(double rho_lo, double rho_hi) const {
  const OscillatoryKernel shrunk(params_, spec_, 0.85 * lo_, 0.85 * hi_);
  const auto a = lattice_symbol(), b = shrunk.lattice_symbol();
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double rho = spec_.frequency_norm(i);
    if (rho >= rho_lo && rho <= rho_hi) worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

GridFunction OscillatoryKernel::convolve_direct(const GridFunction& f) const {
  require_same_grid(f.spec(), spec_, "OscillatoryKernel::convolve_direct");
  const GridSpec& s = spec_;
  std::vector<cplx> out(s.size());
  for (std::size_t x = 0; x < s.size(); ++x) {
    const auto xi = s.axis_indices(x);
    cplx acc = 0.0;
    for (std::size_t y = 0; y < s.size(); ++y) {
      const auto yi = s.axis_indices(y);
      acc += samples_[s.flat(s.wrap(xi[0] - yi[0]), s.dim() == 2 ? s.wrap(xi[1] - yi[1]) : 0)] * f[y];
    }
    out[x] = s.cell_volume() * acc;
  }
  return GridFunction(s, std::move(out));
}

// ---------------------------------------------------------------------------

GridFunction propagator(const GridFunction& f, double s, double alpha) {
  return radial_multiply(f, [&](std::size_t, double rho) {
    return rho == 0.0 ? cplx(1.0) : std::polar(1.0, s * std::pow(rho, alpha));
  });
}

GridFunction fractional_laplacian(const GridFunction& f, double order) {
  if (order == 0.0) return f;
  Spectrum s = forward_transform(f);
  if (order < 0.0 && std::abs(s.coeffs[0]) > 1e-10 * std::sqrt(spectral_l2_squared(s)))
    throw Error("fractional_laplacian: negative order needs a mean-zero function");
  s.coeffs[0] = 0.0;
  for (std::size_t i = 1; i < s.coeffs.size(); ++i) s.coeffs[i] *= std::pow(s.spec.frequency_norm(i), order);
  return inverse_transform(s);
}

GridFunction bessel_potential(const GridFunction& f, double order, double scale) {
  return radial_multiply(f, [&](std::size_t, double rho) {
    return cplx(std::pow(1.0 + scale * scale * rho * rho, order / 2.0));
  });
}

GridFunction dilate(const GridFunction& f, double lambda) {
  if (!(lambda > 0.0)) throw Error("dilate: lambda must be positive");
  const GridSpec& s = f.spec();
  GridSpec out(s.dim(), s.n(), s.length() / lambda);
  return GridFunction(out, std::vector<cplx>(f.values().begin(), f.values().end()));
}

}  // namespace subdyadic
