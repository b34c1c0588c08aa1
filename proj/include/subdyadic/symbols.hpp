#pragma once

#include <string>
#include <vector>

#include "subdyadic/grid.hpp"
#include "subdyadic/partition.hpp"

namespace subdyadic {

enum class ModelVariant { homogeneous, two_sided, inhomogeneous };

const char* variant_name(ModelVariant v);
ModelVariant parse_variant(const std::string& name);

/// |xi|^alpha >= 1, the region where the homogeneous model lives.
bool in_outer_region(double rho, double alpha);

/// homogeneous: |xi|^{-beta} e^{i|xi|^alpha} on |xi|^alpha >= 1;
/// two_sided: the same formula on every xi != 0;
/// inhomogeneous: e^{i|xi|^alpha} (1 + |xi|^2)^{-beta/2}.
Symbol model_symbol(double alpha, double beta, ModelVariant variant);

/// JSON {variant, alpha, beta} of a model symbol.
std::string model_descriptor(double alpha, double beta, ModelVariant variant);

/// The derivative condition with exponent -beta + |gamma|(alpha - 1) on
/// |xi|^alpha >= 1 and -beta - |gamma| on |xi|^alpha <= 1. The inner branch
/// is the alpha = 0 case of the Miyachi check.
struct TwoSidedReport {
  ConditionReport outer;
  ConditionReport inner;
  double constant() const { return std::max(outer.constant, inner.constant); }
  std::string to_json() const;
};
TwoSidedReport twoside_check(const Symbol& m, double alpha, double beta, const CheckOptions& outer,
                             const CheckOptions& inner);

/// phi(xi) = 1 - plateau(|xi|^alpha): 0 on |xi|^alpha <= 1, 1 on |xi|^alpha >= 2.
double split_cutoff(double rho, double alpha);

struct SplitSymbol {
  Symbol low;   ///< m - m_high, supported in |xi|^alpha <= 2
  Symbol high;  ///< phi m, supported in |xi|^alpha >= 1
};
SplitSymbol split_multiplier(const Symbol& m, double alpha);

// ---------------------------------------------------------------------------
// Oscillatory kernels e^{i|x|^a} |x|^{-b} (1 - eta(x))

struct OscKernelParams {
  double a = 2.0;
  double b = 1.0;
  int dim = 1;

  /// a/(a - 1).
  double alpha() const { return a / (a - 1.0); }
  /// (d a/2 - d + b)/(a - 1).
  double beta() const { return (dim * a / 2.0 - dim + b) / (a - 1.0); }
  /// Rejects a <= 0, a = 1 and b < d(1 - a/2).
  void validate() const;
  std::string to_json() const;
};

/// Kernel on the periodic box, multiplied by a radial window
/// ramp_down(|x|, window_lo, window_hi) so it vanishes before |x| = L/2.
class OscillatoryKernel {
 public:
  OscillatoryKernel(OscKernelParams params, GridSpec spec, double window_lo, double window_hi);
  /// Window on [L/4, 0.45 L].
  OscillatoryKernel(OscKernelParams params, GridSpec spec);

  const OscKernelParams& params() const { return params_; }
  const GridSpec& spec() const { return spec_; }
  double window_lo() const { return lo_; }
  double window_hi() const { return hi_; }

  /// eta: 1 on |x| <= 1/2, 0 on |x| >= 1.
  static double eta(double r);
  /// Unwindowed kernel at radius r.
  cplx profile(double r) const;
  /// Windowed samples at minimum-image positions.
  const GridFunction& samples() const { return samples_; }
  /// h^d sum_x K(x) e^{-i x.xi} at every lattice frequency.
  std::vector<cplx> lattice_symbol() const;
  /// The same sum evaluated at arbitrary xi (a trigonometric polynomial).
  cplx transform(const Point& xi) const;
  Symbol symbol() const;

  /// sup over lattice xi with rho_lo <= |xi| <= rho_hi of the change in the
  /// transform when both window radii shrink by 15%.
  double window_perturbation(double rho_lo, double rho_hi) const;

  /// Physical-side circular convolution h^d sum_y K(x - y) f(y).
  GridFunction convolve_direct(const GridFunction& f) const;

 private:
  OscKernelParams params_;
  GridSpec spec_;
  double lo_, hi_;
  GridFunction samples_;
  std::vector<double> pos0_, pos1_;
  std::vector<cplx> nonzero_;
};

// ---------------------------------------------------------------------------
// Evolutions and potentials

/// e^{i s |xi|^alpha} applied to f; the zero mode is left unchanged.
GridFunction propagator(const GridFunction& f, double s, double alpha);

/// |xi|^order; negative orders need mean-zero f (the zero mode is dropped
/// for order != 0).
GridFunction fractional_laplacian(const GridFunction& f, double order);

/// (1 + scale^2 |xi|^2)^{order/2}; scale = s^{1/alpha} gives (I - s^{2/alpha} Delta)^{order/2}.
GridFunction bessel_potential(const GridFunction& f, double order, double scale = 1.0);

/// The same samples viewed on the box of length L / lambda: f_lambda(x) = f(lambda x).
GridFunction dilate(const GridFunction& f, double lambda);

}  // namespace subdyadic
