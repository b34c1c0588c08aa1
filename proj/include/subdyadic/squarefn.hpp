#pragma once

#include <array>
#include <cmath>
#include <iosfwd>
#include <vector>

#include "subdyadic/grid.hpp"

namespace subdyadic {

/// Radial Fourier profile phi_hat with annular support and the scale
/// normalisation int_0^inf phi_hat(t) dt/t = 1.
///
/// phi_hat(rho) = c * exp(-2.5 / (s (1 - s))) with s = log2(rho) on [1, 2]
/// (alpha >= 0) or s = log2(2 rho) on [1/2, 1] (alpha < 0).
class AnalyzingFunction {
 public:
  explicit AnalyzingFunction(double alpha);

  double operator()(double rho) const;
  double support_lo() const { return lo_; }
  double support_hi() const { return 2.0 * lo_; }
  /// Normalising constant c.
  double scale() const { return c_; }
  /// int_0^inf phi_hat(u)^2 du/u.
  double kappa_squared() const { return kappa2_; }

 private:
  double lo_;
  double c_;
  double kappa2_;
};

/// Geometric scale nodes t_j = 2^{j/n}, each carrying the weight log(2^{1/n}).
struct ScaleGrid {
  std::vector<double> t;
  double ratio = 0.0;
  double log_ratio = 0.0;
};

/// Nodes whose annulus phi_hat(t |xi|) meets band_lo <= |xi| <= band_hi.
/// With `restrict_region` only nodes with t^alpha <= 1 are kept.
ScaleGrid make_scale_grid(const AnalyzingFunction& phi, double alpha, double band_lo, double band_hi,
                          int per_octave = 8, bool restrict_region = true);

/// Occupied band [min |xi|, max |xi|] over modes with |fhat| > tol * max|fhat|.
std::array<double, 2> spectral_band(const Spectrum& s, double tol = 1e-12);

/// Space-scale regions as membership predicates on (|y - x|, t).
struct ApproachRegion {
  enum class Kind { gamma, lambda_s, gamma_s };
  Kind kind = Kind::gamma;
  double alpha = 0.0;
  double s = 1.0;

  bool contains(double distance, double t) const;
  /// Largest |y - x| admitted at scale t, or -1 when t is not admissible.
  double reach(double t) const;
};

/// R_t^lambda(x) = t^{(alpha-1)d} (1 + t^{alpha-1}|x|)^{-d lambda}.
struct DecayKernel {
  double alpha;
  double lambda;
  double t;
  int dim;

  double operator()(double x_norm) const;
  /// max over the grid of (R * R) / R, convolution on the torus.
  double self_convolution_ratio(const GridSpec& spec) const;
};

/// f * phi_t as the multiplier phi_hat(t|xi|).
GridFunction littlewood_paley_piece(const GridFunction& f, const AnalyzingFunction& phi, double t);
GridFunction littlewood_paley_piece(const Spectrum& fhat, const AnalyzingFunction& phi, double t);

/// Region-averaged square function over |y - x| <= t^{1-alpha}.
Weight g_alpha_beta(const GridFunction& f, double alpha, double beta, const AnalyzingFunction& phi,
                    const ScaleGrid& grid);
/// Same, from lattice Fourier coefficients. Spectra supported in |xi|^alpha <= 1
/// give exactly zero.
Weight g_alpha_beta(const Spectrum& fhat, double alpha, double beta, const AnalyzingFunction& phi,
                    const ScaleGrid& grid);

/// Square function with the decay kernel (1 + |x - y| / t^{1-alpha})^{-d lambda}.
Weight g_star(const GridFunction& f, double alpha, double beta, double lambda, const AnalyzingFunction& phi,
              const ScaleGrid& grid);

/// Phi = |Theta|^2 with Theta(x) = theta(x_1) theta(x_2), theta_hat a smooth
/// even bump on |xi| <= halfwidth, theta(0) = 1. Phi_hat lives in the box of
/// half-width 2 * halfwidth, inside the unit ball when halfwidth <= 1/(2 sqrt d).
class AuxProfile {
 public:
  AuxProfile(int dim, double halfwidth);
  static AuxProfile standard(int dim) { return AuxProfile(dim, 0.5 / std::sqrt(static_cast<double>(dim))); }

  int dim() const { return dim_; }
  double theta(double x) const;
  double operator()(const Point& x) const;
  /// min of Phi on the closed unit ball.
  double lower_constant() const { return lower_; }
  /// sup of Phi(x) (1 + |x|)^{d lambda}.
  double upper_constant(double lambda) const;

 private:
  int dim_;
  double halfwidth_;
  std::vector<double> nodes_, weights_;
  double theta0_;
  double lower_;
};

/// Square function against Phi((x - y) / t^{1-alpha}).
Weight g_phi_aux(const GridFunction& f, double alpha, double beta, const AuxProfile& profile,
                 const AnalyzingFunction& phi, const ScaleGrid& grid);

/// Pointwise (int_0^inf |f * phi_t|^2 dt/t)^{1/2}; the grid must cover the band of f.
Weight s_phi(const GridFunction& f, const AnalyzingFunction& phi, const ScaleGrid& grid);

/// CSV "t,value" of t^{-2 beta} ||f * phi_t||_2^2 over the grid.
void write_energy_profile(std::ostream& os, const GridFunction& f, double beta, const AnalyzingFunction& phi,
                          const ScaleGrid& grid);

}  // namespace subdyadic
