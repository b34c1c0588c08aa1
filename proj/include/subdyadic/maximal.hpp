#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "subdyadic/grid.hpp"

namespace subdyadic {

/// Radii scanned by every maximal operator: h/2 (the cell alone), then
/// h 2^{j/4} for j >= 0, closed by L sqrt(d) / 2, whose ball is the whole torus.
std::vector<double> radius_grid(const GridSpec& spec);

/// |B(x, r)| as the lattice count times h^d, so averages of constants are exact.
double ball_volume(const GridSpec& spec, double r);
/// out[x] = integral of w over the lattice ball B(x, r).
std::vector<double> ball_integrals(const Weight& w, double r);

/// Centered Hardy-Littlewood maximal function, iterated k times.
Weight hl_maximal(const Weight& w, int k = 1);

/// sup_r r^{2 beta - d} int_{B(x,r)} w, centered; needs 0 <= 2 beta < d.
Weight fractional_maximal(const Weight& w, double beta);
/// [min, max] over the radius grid of |B(x,r)| / r^d: the constants relating
/// fractional_maximal(w, 0) to hl_maximal(w).
std::array<double, 2> fractional_volume_bounds(const GridSpec& spec);

/// sup over r^alpha <= 1 and |y - x| <= r^{1-alpha} of r^{2 beta} times the
/// average of w over B(y, r). The factor |B|^{2 beta/d} is taken with volumes
/// in units of the unit ball, so it is r^{2 beta} exactly.
Weight subdyadic_maximal(const Weight& w, double alpha, double beta);

/// Same average over |y - x| <= s r^{1-alpha} with every radius allowed;
/// needs 0 <= 2 beta < d so large balls do not dominate on the torus.
Weight global_maximal(const Weight& w, double alpha, double beta, double s = 1.0);

/// sup over r <= 1 and |y - x| <= s^{1/alpha} r^{1-alpha} of
/// r^{2 beta} times the average of w over B(y, s^{1/alpha} r); alpha != 0.
Weight inhomogeneous_maximal(const Weight& w, double alpha, double beta, double s);

/// Tube of cross-sectional radius r and length r^{1-alpha} (d = 2).
/// Offset o (minimum image, in cells) is inside when |o.e| h <= length/2 and
/// |o.e_perp| h <= r, e = (cos angle, sin angle) in (axis 0, axis 1).
bool tube_contains(const GridSpec& spec, double r, double length, double angle, int o0, int o1);
/// Orientations sampled at radius r: ceil(pi r^{-alpha}) equispaced angles in
/// [0, pi), at most kMaxTubeAngles.
std::vector<double> tube_angles(double r, double alpha);
inline constexpr int kMaxTubeAngles = 64;
/// Radii at which tubes are formed: grid radii with r^alpha <= 1.
std::vector<double> admissible_radii(const GridSpec& spec, double alpha);

/// sup over admissible r, sampled orientations and tubes T containing x of
/// r^{2 beta} |T|^{-1} int_T w. d = 2 only.
Weight nikodym_maximal(const Weight& w, double alpha, double beta);
Weight nikodym_maximal(const GridFunction& f, double alpha, double beta);
/// Covering constant C with nikodym <= C subdyadic (any beta): max over radii
/// of the number of radius-r balls covering a tube times |B_r| / |T|.
double nikodym_chain_constant(const GridSpec& spec, double alpha);

/// A_t w: average over B(x, t); one cell <= t <= L/2.
Weight scale_average(const Weight& w, double t);
/// A_t^* w = sup over r >= t (r = t and grid radii) of A_r w.
Weight running_sup_average(const Weight& w, double t);
/// C with A_t^* w <= C A_t(M w): max over r of |B(r')| / |B(r)|, r' the
/// first grid radius >= r + t.
double running_sup_constant(const GridSpec& spec, double t);

/// Radial regularising profile P(|x|), nonnegative, supported in |x| <= support
/// and positive on the closed unit ball.
struct RadialProfile {
  std::string label;
  std::function<double(double)> fn;
  double support = 2.0;

  /// 1 on [0, 1], smooth decay to 0 at 2.
  static RadialProfile standard();
  /// Throws when the profile is negative somewhere or vanishes on the unit ball.
  void validate() const;
  double sup() const;
  /// h^d sum_o P_r(o), P_r(x) = r^{-d} P(|x| / r), over minimum-image offsets.
  double lattice_l1(const GridSpec& spec, double r) const;
};

/// sup over Gamma_alpha(x) of r^{2 beta} (P_r * w)(y).
Weight regularised_maximal(const Weight& w, double alpha, double beta, const RadialProfile& profile);
/// c_P with regularised >= c_P subdyadic (any beta), pointwise: min over
/// admissible r of |B_r| min_{B_r} P_r.
double regularised_domination_constant(const GridSpec& spec, double alpha, const RadialProfile& profile);

// ---------------------------------------------------------------------------
// Operator-norm trends

using WeightOperator = std::function<Weight(const Weight&)>;
using CorpusFactory = std::function<std::vector<Weight>(const GridSpec&)>;

inline constexpr double kGrowthJump = 1.1;
inline constexpr double kGrowthSlope = 0.05;

struct OpnormReport {
  double p = 2, q = 2, alpha = 0, beta = 0;
  std::vector<int> sizes;
  std::vector<double> norms;
  /// "growing" when a norm exceeds the running max by more than 10% or the
  /// fitted exponent is above 0.05; otherwise "bounded".
  std::string verdict;
  /// Least-squares slope of log norm against log N over the last three sizes.
  double fitted_exponent = 0;

  /// Sets verdict and fitted_exponent from sizes and norms.
  void classify();
  std::string to_json() const;
};

/// Boxes for an L^p -> L^q scan: h_k = h0 2^{-k}, with the torus long enough
/// (L >= 4 h^{1-alpha}) to hold the reach of the finest scale.
std::vector<GridSpec> opnorm_boxes(int dim, double alpha, double h0, double min_length, int levels);

/// max over the corpus of ||op w||_q / ||w||_p on each box; 1 < p <= q <= inf.
OpnormReport empirical_opnorm(const WeightOperator& op, double p, double q, const CorpusFactory& corpus,
                              const std::vector<GridSpec>& boxes, double alpha = 0.0, double beta = 0.0);

}  // namespace subdyadic
