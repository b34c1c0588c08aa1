#include "subdyadic/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <tuple>

#include "subdyadic/simd.hpp"

namespace subdyadic {

GridSpec::GridSpec(int dim, int n, double length) : dim_(dim), n_(n), length_(length) {
  if (dim != 1 && dim != 2) throw Error("GridSpec: dimension must be 1 or 2");
  if (n < 8 || !std::has_single_bit(static_cast<unsigned>(n)))
    throw Error("GridSpec: N must be a power of two >= 8, got " + std::to_string(n));
  if (!(length > 0.0) || !std::isfinite(length)) throw Error("GridSpec: box length must be positive");
  size_ = dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
}

std::array<int, 2> GridSpec::axis_indices(std::size_t flat) const {
  if (dim_ == 1) return {static_cast<int>(flat), 0};
  return {static_cast<int>(flat / n_), static_cast<int>(flat % n_)};
}

std::size_t GridSpec::flat(int i0, int i1) const {
  if (dim_ == 1) return static_cast<std::size_t>(wrap(i0));
  return static_cast<std::size_t>(wrap(i0)) * n_ + wrap(i1);
}

Point GridSpec::frequency(std::size_t flat) const {
  auto [i0, i1] = axis_indices(flat);
  const double dk = freq_step();
  if (dim_ == 1) return {dk * signed_index(i0), 0.0};
  return {dk * signed_index(i0), dk * signed_index(i1)};
}

double GridSpec::frequency_norm(std::size_t flat) const {
  Point xi = frequency(flat);
  return std::hypot(xi[0], xi[1]);
}

Point GridSpec::position(std::size_t flat) const {
  auto [i0, i1] = axis_indices(flat);
  if (dim_ == 1) return {cell() * i0, 0.0};
  return {cell() * i0, cell() * i1};
}

double GridSpec::periodic_distance(std::size_t a, std::size_t b) const {
  auto [a0, a1] = axis_indices(a);
  auto [b0, b1] = axis_indices(b);
  const double o0 = min_image(a0 - b0);
  const double o1 = dim_ == 1 ? 0.0 : min_image(a1 - b1);
  return cell() * std::sqrt(o0 * o0 + o1 * o1);
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw Error(std::string(what) + ": grid mismatch");
}

// ---------------------------------------------------------------------------

namespace {

void require_finite(std::span<const cplx> v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag()))
      throw Error(std::string(what) + ": non-finite entry at index " + std::to_string(i));
}

}  // namespace

GridFunction::GridFunction(GridSpec spec, std::vector<cplx> values)
    : spec_(spec), values_(std::move(values)) {
  if (values_.size() != spec_.size()) throw Error("GridFunction: value count does not match grid");
  require_finite(values_, "GridFunction");
}

GridFunction GridFunction::zeros(const GridSpec& spec) {
  return GridFunction(spec, std::vector<cplx>(spec.size()));
}

GridFunction GridFunction::sample(const GridSpec& spec, const std::function<cplx(const Point&)>& fn) {
  std::vector<cplx> v(spec.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(spec.position(i));
  return GridFunction(spec, std::move(v));
}

GridFunction GridFunction::operator+(const GridFunction& o) const {
  require_same_grid(spec_, o.spec_, "GridFunction::operator+");
  std::vector<cplx> v(values_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.values_[i];
  return GridFunction(spec_, std::move(v));
}

GridFunction GridFunction::operator-(const GridFunction& o) const {
  require_same_grid(spec_, o.spec_, "GridFunction::operator-");
  std::vector<cplx> v(values_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= o.values_[i];
  return GridFunction(spec_, std::move(v));
}

GridFunction GridFunction::scaled(cplx a) const {
  std::vector<cplx> v(values_);
  for (auto& x : v) x *= a;
  return GridFunction(spec_, std::move(v));
}

// ---------------------------------------------------------------------------

Weight::Weight(GridSpec spec, std::vector<double> values) : spec_(spec), values_(std::move(values)) {
  if (values_.size() != spec_.size()) throw Error("Weight: value count does not match grid");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw Error("Weight: non-finite entry at index " + std::to_string(i));
    if (values_[i] < 0.0) throw Error("Weight: negative entry at index " + std::to_string(i));
  }
}

Weight Weight::constant(const GridSpec& spec, double c) {
  return Weight(spec, std::vector<double>(spec.size(), c));
}

Weight Weight::sample(const GridSpec& spec, const std::function<double(const Point&)>& fn) {
  std::vector<double> v(spec.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(spec.position(i));
  return Weight(spec, std::move(v));
}

Weight Weight::modulus(const GridFunction& f) {
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::abs(f[i]);
  return Weight(f.spec(), std::move(v));
}

double Weight::max() const { return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end()); }

bool Weight::identically_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return x == 0.0; });
}

Weight Weight::operator+(const Weight& o) const {
  require_same_grid(spec_, o.spec_, "Weight::operator+");
  std::vector<double> v(values_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.values_[i];
  return Weight(spec_, std::move(v));
}

Weight Weight::scaled(double c) const {
  if (c < 0.0) throw Error("Weight::scaled: negative factor");
  std::vector<double> v(values_);
  for (auto& x : v) x *= c;
  return Weight(spec_, std::move(v));
}

// ---------------------------------------------------------------------------

Symbol Symbol::radial(std::string label, std::function<cplx(double)> profile, std::function<bool(double)> support) {
  Symbol s;
  s.label = std::move(label);
  s.eval = [profile](const Point& xi) { return profile(std::hypot(xi[0], xi[1])); };
  if (support) s.support = [support](const Point& xi) { return support(std::hypot(xi[0], xi[1])); };
  return s;
}

Symbol Symbol::one() {
  Symbol s;
  s.label = "one";
  s.eval = [](const Point&) { return cplx(1.0, 0.0); };
  return s;
}

// ---------------------------------------------------------------------------
// FFTW plans are created once per (dim, N, direction) and executed on caller
// buffers through the new-array interface; planning is serialised.

namespace {

struct PlanCache {
  std::mutex mu;
  std::map<std::tuple<int, int, int>, fftw_plan> plans;

  fftw_plan get(int dim, int n, int sign) {
    std::lock_guard lock(mu);
    auto key = std::make_tuple(dim, n, sign);
    if (auto it = plans.find(key); it != plans.end()) return it->second;
    const std::size_t size = dim == 1 ? n : static_cast<std::size_t>(n) * n;
    fftw_complex* buf = fftw_alloc_complex(size);
    fftw_plan p = dim == 1 ? fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED)
                           : fftw_plan_dft_2d(n, n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    plans.emplace(key, p);
    return p;
  }
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

void fft_inplace(const GridSpec& spec, std::vector<cplx>& data, bool inverse) {
  if (data.size() != spec.size()) throw Error("fft_inplace: size mismatch");
  fftw_plan p = plan_cache().get(spec.dim(), spec.n(), inverse ? FFTW_BACKWARD : FFTW_FORWARD);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p, ptr, ptr);
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.size()));
  for (auto& x : data) x *= scale;
}

Spectrum forward_transform(const GridFunction& f) {
  std::vector<cplx> data(f.values().begin(), f.values().end());
  fft_inplace(f.spec(), data, false);
  return Spectrum{f.spec(), std::move(data)};
}

GridFunction inverse_transform(const Spectrum& s) {
  std::vector<cplx> data(s.coeffs);
  fft_inplace(s.spec, data, true);
  return GridFunction(s.spec, std::move(data));
}

std::vector<cplx> sample_symbol(const Symbol& m, const GridSpec& spec) {
  std::vector<cplx> out(spec.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Point xi = spec.frequency(i);
    if (i == 0 && !m.defined_at_zero) continue;
    if (m.support && !m.support(xi)) continue;
    const cplx v = m.eval(xi);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream os;
      os << "symbol '" << m.label << "' is not finite at lattice point xi = (" << xi[0];
      if (spec.dim() == 2) os << ", " << xi[1];
      os << ")";
      throw Error(os.str());
    }
    out[i] = v;
  }
  return out;
}

GridFunction apply_sampled_multiplier(std::span<const cplx> samples, const Spectrum& fhat) {
  if (samples.size() != fhat.coeffs.size()) throw Error("apply_multiplier: symbol size mismatch");
  std::vector<cplx> data(fhat.coeffs.size());
  simd::kernels().cmul(fhat.coeffs.data(), samples.data(), data.data(), data.size());
  fft_inplace(fhat.spec, data, true);
  return GridFunction(fhat.spec, std::move(data));
}

GridFunction apply_sampled_multiplier(std::span<const cplx> samples, const GridFunction& f) {
  return apply_sampled_multiplier(samples, forward_transform(f));
}

GridFunction apply_multiplier(const Symbol& m, const GridFunction& f) {
  const auto samples = sample_symbol(m, f.spec());
  return apply_sampled_multiplier(samples, f);
}

// ---------------------------------------------------------------------------

double lp_norm(const GridFunction& f, double p) {
  if (!(p >= 1.0)) throw Error("lp_norm: exponent must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : f.values()) m = std::max(m, std::abs(v));
    return m;
  }
  const double dv = f.spec().cell_volume();
  if (p == 2.0) {
    std::vector<double> ones(f.size(), 1.0);
    return std::sqrt(dv * simd::kernels().abs2_dot(f.values().data(), ones.data(), f.size()));
  }
  double s = 0.0;
  for (const auto& v : f.values()) s += std::pow(std::abs(v), p);
  return std::pow(dv * s, 1.0 / p);
}

double lp_norm(const Weight& w, double p) {
  if (!(p >= 1.0)) throw Error("lp_norm: exponent must be >= 1");
  if (std::isinf(p)) return w.max();
  double s = 0.0;
  for (double v : w.values()) s += std::pow(v, p);
  return std::pow(w.spec().cell_volume() * s, 1.0 / p);
}

double spectral_l2_squared(const Spectrum& s) {
  std::vector<double> ones(s.coeffs.size(), 1.0);
  return s.spec.cell_volume() * simd::kernels().abs2_dot(s.coeffs.data(), ones.data(), ones.size());
}

double sobolev_seminorm(const GridFunction& f, double theta) {
  if (theta < 0.0) throw Error("sobolev_norm_hom: theta must be >= 0");
  const Spectrum s = forward_transform(f);
  double acc = 0.0;
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
    if (i == 0 && theta > 0.0) continue;
    const double rho = f.spec().frequency_norm(i);
    acc += (theta == 0.0 ? 1.0 : std::pow(rho, 2.0 * theta)) * std::norm(s.coeffs[i]);
  }
  return std::sqrt(f.spec().cell_volume() * acc);
}

double sobolev_norm_hom(const GridFunction& f, double theta) {
  if (theta > 0.0) {
    cplx mean = 0.0;
    double scale = 0.0;
    for (const auto& v : f.values()) {
      mean += v;
      scale += std::abs(v);
    }
    if (std::abs(mean) > 1e-10 * std::max(scale, 1e-300))
      throw Error("sobolev_norm_hom: homogeneous norm of positive order needs a mean-zero function");
  }
  return sobolev_seminorm(f, theta);
}

double weighted_l2(const GridFunction& f, const Weight& w) {
  require_same_grid(f.spec(), w.spec(), "weighted_l2");
  return f.spec().cell_volume() * simd::kernels().abs2_dot(f.values().data(), w.values().data(), f.size());
}

double integral(const Weight& w) {
  double s = 0.0;
  for (double v : w.values()) s += v;
  return s * w.spec().cell_volume();
}

std::vector<GridFunction> spectral_gradient(const GridFunction& f) {
  const Spectrum s = forward_transform(f);
  std::vector<GridFunction> out;
  for (int axis = 0; axis < f.spec().dim(); ++axis) {
    Spectrum d{s.spec, s.coeffs};
    for (std::size_t i = 0; i < d.coeffs.size(); ++i) {
      auto [i0, i1] = f.spec().axis_indices(i);
      const int idx = axis == 0 ? i0 : i1;
      // the Nyquist mode has no consistent derivative for real data; drop it
      if (idx == f.spec().n() / 2) {
        d.coeffs[i] = 0.0;
        continue;
      }
      d.coeffs[i] *= cplx(0.0, f.spec().frequency(i)[axis]);
    }
    out.push_back(inverse_transform(d));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

template <typename T>
void put_le(std::ostream& os, T v) {
  static_assert(std::endian::native == std::endian::little, "big-endian hosts need byte swapping");
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  os.write(buf, sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  char buf[sizeof(T)];
  if (!is.read(buf, sizeof(T))) throw Error("read_binary: truncated record");
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace

void write_binary(std::ostream& os, const GridFunction& f) {
  put_le<std::int32_t>(os, f.spec().dim());
  put_le<std::int32_t>(os, f.spec().n());
  put_le<double>(os, f.spec().length());
  for (const auto& v : f.values()) {
    put_le<double>(os, v.real());
    put_le<double>(os, v.imag());
  }
}

GridFunction read_binary(std::istream& is) {
  const int d = get_le<std::int32_t>(is);
  const int n = get_le<std::int32_t>(is);
  const double len = get_le<double>(is);
  GridSpec spec(d, n, len);
  std::vector<cplx> v(spec.size());
  for (auto& x : v) {
    const double re = get_le<double>(is);
    const double im = get_le<double>(is);
    x = cplx(re, im);
  }
  return GridFunction(spec, std::move(v));
}

void write_csv(std::ostream& os, const GridFunction& f) {
  const auto& spec = f.spec();
  os << (spec.dim() == 1 ? "x,re,im\n" : "x,y,re,im\n");
  char buf[128];
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Point p = spec.position(i);
    if (spec.dim() == 1)
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p[0], f[i].real(), f[i].imag());
    else
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", p[0], p[1], f[i].real(), f[i].imag());
    os << buf;
  }
}

void write_csv(std::ostream& os, const Weight& w) {
  const auto& spec = w.spec();
  os << (spec.dim() == 1 ? "x,value\n" : "x,y,value\n");
  char buf[128];
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Point p = spec.position(i);
    if (spec.dim() == 1)
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p[0], w[i]);
    else
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p[0], p[1], w[i]);
    os << buf;
  }
}

}  // namespace subdyadic
