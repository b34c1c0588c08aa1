#pragma once

#include <array>
#include <string>
#include <vector>

#include "subdyadic/grid.hpp"

namespace subdyadic {

/// Frequency ball whose radius is comparable to dist(B,0)^{1-alpha}.
struct SubdyadicBall {
  int dim = 1;
  Point center{0.0, 0.0};
  double radius = 0.0;
  double alpha = 0.0;

  /// max(|c| - r, 0)
  double dist() const;
  /// r / dist^{1-alpha}; lies in [kRatioMin, kRatioMax] for enumerated balls.
  double ratio() const;
  bool contains(const Point& xi, double dilation = 1.0) const;
  /// dist(B,0)^alpha >= 1 (with a 1e-12 tolerance).
  bool satisfies_support_condition() const;
  /// |B|, with |B_1| = 2 (d=1) or pi (d=2).
  double volume() const;
};

inline constexpr double kRatioMin = 0.25;
inline constexpr double kRatioMax = 1.0;
/// Supports of partition cutoffs sit inside this dilate of their ball.
inline constexpr double kSupportDilation = 1.75;

struct BallCover {
  std::vector<SubdyadicBall> balls;
  /// Radial band guaranteed covered: [covered_min, covered_max].
  double covered_min = 0.0;
  double covered_max = 0.0;
  /// Largest number of balls containing one sampled point of the band.
  int multiplicity = 0;
};

/// Covers {rho_min <= |xi| <= rho_max} by alpha-subdyadic balls, shell by
/// shell. In d = 2 with alpha > 0 and rho_min close to 1 the innermost band
/// below 1 + r/2 cannot be covered by balls with dist >= 1; covered_min
/// reports where coverage starts.
BallCover enumerate_balls(int dim, double alpha, double rho_min, double rho_max);

/// Largest number of balls containing any of the points.
int ball_multiplicity(const std::vector<SubdyadicBall>& balls, const std::vector<Point>& points);

/// One cutoff annulus(2^{-k} xi) * prod_i lattice_bump(2^{-(1-alpha)k} xi_i - l_i).
struct PartitionElement {
  SubdyadicBall ball;
  int k = 0;
  std::array<int, 2> ell{0, 0};
  /// 2^{(1-alpha)k}: side of the lattice cell in frequency.
  double cell = 1.0;
  /// Axis-aligned box containing the support: lo0, hi0, lo1, hi1.
  std::array<double, 4> support_box{};

  double eval(const Point& xi) const;
  Symbol symbol() const;
};

/// Sparse samples of one cutoff on the frequency lattice.
struct SampledCutoff {
  std::vector<std::size_t> index;
  std::vector<double> value;
};

SampledCutoff sample_cutoff(const PartitionElement& e, const GridSpec& spec);

/// Elements of the lattice partition whose support meets the shell
/// rho_min <= |xi| <= rho_max. Throws if rho_max exceeds the Nyquist
/// frequency of the grid.
std::vector<PartitionElement> build_partition(const GridSpec& spec, double alpha, double rho_min, double rho_max);

/// f * psi_B for one element.
GridFunction project(const GridFunction& f, const PartitionElement& e);

std::string partition_manifest_json(const std::vector<PartitionElement>& elements);

// ---------------------------------------------------------------------------
// Multiplier-condition checkers.

struct FlaggedPoint {
  Point xi;
  std::array<int, 2> order;
  double coarse;
  double fine;
};

struct ConditionReport {
  std::string condition;
  double alpha = 0.0;
  double beta = 0.0;
  double rho_min = 0.0;
  double rho_max = 0.0;
  double constant = 0.0;
  Point worst_point{0.0, 0.0};
  std::array<int, 2> worst_order{0, 0};
  double worst_theta = 0.0;
  std::size_t samples = 0;
  std::vector<FlaggedPoint> flagged;

  std::string to_json() const;
};

struct CheckOptions {
  int dim = 1;
  double rho_min = 1.0;
  double rho_max = 16.0;
  /// Negative selects floor(d/2) + 1.
  int gamma_max = -1;
  /// Extra points folded into the pointwise sample.
  std::vector<Point> extra_points;
  /// Quadrature nodes per axis inside each ball for the averaged checks.
  int nodes_per_axis = 8;
  /// Cap on the number of balls visited (evenly strided when exceeded).
  std::size_t max_balls = 4000;
};

/// Partial derivative D^gamma m at xi by central differences at step h, with
/// a second evaluation at h/2. Returns {value at h/2, value at h}.
std::array<cplx, 2> symbol_derivative(const Symbol& m, const Point& xi, std::array<int, 2> gamma, double h, int dim);

/// Derivative step min(1e-4 |xi|^{1-alpha}, 1e-4).
double derivative_step(double rho, double alpha);

ConditionReport miyachi_check(const Symbol& m, double alpha, double beta, const CheckOptions& opt);
ConditionReport hormander_sd_check(const Symbol& m, double alpha, double beta, const CheckOptions& opt);

/// Normalised bump on the unit ball, supported in |u| <= 2.
struct BumpFunction {
  std::string label;
  std::function<double(const Point&)> profile;
  int dim = 1;

  /// sup |D^gamma profile| over |gamma| <= d + 1, by sampling and finite differences.
  double derivative_sup() const;
  double eval(const SubdyadicBall& ball, const Point& xi) const;
};

inline int bump_order(int dim) { return dim + 1; }

/// Reference bumps with derivative_sup() <= 1.
std::vector<BumpFunction> standard_bumps(int dim);

ConditionReport hormander_sob_check(const Symbol& m, double alpha, double beta, std::vector<double> thetas,
                                    const std::vector<BumpFunction>& bumps, const CheckOptions& opt);

/// Default smoothness sigma = d/2 + 1/2 and theta list {0, sigma/2, sigma}.
inline double default_sigma(int dim) { return dim / 2.0 + 0.5; }
std::vector<double> default_thetas(int dim);

}  // namespace subdyadic
