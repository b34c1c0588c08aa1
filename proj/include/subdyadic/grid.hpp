#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace subdyadic {

using cplx = std::complex<double>;

/// A point of R^d, d <= 2. The second coordinate is ignored when d == 1.
using Point = std::array<double, 2>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Geometry of a periodic box [0, L)^d sampled at N points per axis.
///
/// Samples sit at x_j = j L / N. Lattice frequencies are 2 pi k / L with
/// k in [-N/2, N/2) per axis; flat indices are row-major (axis 0 slowest).
class GridSpec {
 public:
  GridSpec(int dim, int n, double length = kTwoPi);

  int dim() const { return dim_; }
  int n() const { return n_; }
  double length() const { return length_; }
  std::size_t size() const { return size_; }
  double cell() const { return length_ / n_; }
  double cell_volume() const { return dim_ == 1 ? cell() : cell() * cell(); }
  double freq_step() const { return kTwoPi / length_; }
  double nyquist() const { return kPi * n_ / length_; }
  double volume() const { return dim_ == 1 ? length_ : length_ * length_; }

  /// Signed lattice index in [-N/2, N/2) for an axis index in [0, N).
  int signed_index(int i) const { return i < n_ / 2 ? i : i - n_; }
  /// Minimum-image offset in cells: in (-N/2, N/2].
  int min_image(int i) const {
    int m = ((i % n_) + n_) % n_;
    return m <= n_ / 2 ? m : m - n_;
  }
  int wrap(int i) const { return ((i % n_) + n_) % n_; }

  Point frequency(std::size_t flat) const;
  double frequency_norm(std::size_t flat) const;
  Point position(std::size_t flat) const;
  std::array<int, 2> axis_indices(std::size_t flat) const;
  std::size_t flat(int i0, int i1 = 0) const;

  /// Periodic (minimum-image) distance between two sample points.
  double periodic_distance(std::size_t a, std::size_t b) const;

  bool operator==(const GridSpec& o) const {
    return dim_ == o.dim_ && n_ == o.n_ && length_ == o.length_;
  }

 private:
  int dim_;
  int n_;
  double length_;
  std::size_t size_;
};

/// Complex samples of a field on a GridSpec. Entries are finite.
class GridFunction {
 public:
  GridFunction(GridSpec spec, std::vector<cplx> values);

  static GridFunction zeros(const GridSpec& spec);
  static GridFunction sample(const GridSpec& spec, const std::function<cplx(const Point&)>& fn);

  const GridSpec& spec() const { return spec_; }
  std::span<const cplx> values() const { return values_; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  GridFunction operator+(const GridFunction& o) const;
  GridFunction operator-(const GridFunction& o) const;
  GridFunction scaled(cplx a) const;

 private:
  GridSpec spec_;
  std::vector<cplx> values_;
};

/// Unitary DFT coefficients of a GridFunction, same layout as the samples.
struct Spectrum {
  GridSpec spec;
  std::vector<cplx> coeffs;
};

/// Nonnegative real field; the carrier of weights and of all maximal and
/// square-function outputs.
class Weight {
 public:
  Weight(GridSpec spec, std::vector<double> values);

  static Weight constant(const GridSpec& spec, double c);
  static Weight sample(const GridSpec& spec, const std::function<double(const Point&)>& fn);
  /// |f|, pointwise.
  static Weight modulus(const GridFunction& f);

  const GridSpec& spec() const { return spec_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  double max() const;
  bool identically_zero() const;

  Weight operator+(const Weight& o) const;
  Weight scaled(double c) const;

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

/// A Fourier multiplier m(xi). Where `support` is false, or at xi = 0 unless
/// `defined_at_zero`, the symbol is taken to be 0.
struct Symbol {
  std::function<cplx(const Point&)> eval;
  std::string label;
  std::function<bool(const Point&)> support;
  bool defined_at_zero = false;

  static Symbol radial(std::string label, std::function<cplx(double)> profile,
                       std::function<bool(double)> support = {});
  static Symbol one();
};

Spectrum forward_transform(const GridFunction& f);
GridFunction inverse_transform(const Spectrum& s);

/// Unitary DFT on raw arrays, used by hot paths that keep their own buffers.
void fft_inplace(const GridSpec& spec, std::vector<cplx>& data, bool inverse);

/// Symbol sampled on the frequency lattice, zero off support and at xi = 0.
/// Throws naming the lattice point if the symbol is NaN or infinite there.
std::vector<cplx> sample_symbol(const Symbol& m, const GridSpec& spec);

GridFunction apply_multiplier(const Symbol& m, const GridFunction& f);
GridFunction apply_sampled_multiplier(std::span<const cplx> samples, const GridFunction& f);
GridFunction apply_sampled_multiplier(std::span<const cplx> samples, const Spectrum& fhat);

/// Riemann-sum L^p norm, (L/N)^d sum |f|^p; p = infinity gives max |f|.
double lp_norm(const GridFunction& f, double p);
double lp_norm(const Weight& w, double p);

/// (L/N)^d sum |fhat|^2, the spectral side of Parseval.
double spectral_l2_squared(const Spectrum& s);

/// Homogeneous Sobolev norm (sum_{xi != 0} |xi|^{2 theta} |fhat|^2)^{1/2} with
/// quadrature weights. Requires mean zero when theta > 0.
double sobolev_norm_hom(const GridFunction& f, double theta);
/// Same quantity with the zero mode dropped instead of checked; used on
/// local grids where the function is compactly supported.
double sobolev_seminorm(const GridFunction& f, double theta);

/// Quadrature of |f|^2 w.
double weighted_l2(const GridFunction& f, const Weight& w);
double integral(const Weight& w);

/// Gradient by spectral differentiation (one field per axis).
std::vector<GridFunction> spectral_gradient(const GridFunction& f);

/// Binary record: int32 d, int32 N, float64 L (little-endian), then
/// interleaved re/im float64 samples in row-major order.
void write_binary(std::ostream& os, const GridFunction& f);
GridFunction read_binary(std::istream& is);
void write_csv(std::ostream& os, const GridFunction& f);
void write_csv(std::ostream& os, const Weight& w);

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what);

}  // namespace subdyadic
