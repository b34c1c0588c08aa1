#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "subdyadic/corpus.hpp"
#include "subdyadic/grid.hpp"
#include "subdyadic/maximal.hpp"

namespace subdyadic {

/// Where an empirical constant was attained.
struct Witness {
  std::string function;
  std::string weight;
  Point point{0.0, 0.0};
  int size = 0;
};

struct InequalityReport {
  std::string name;
  /// Label of the inequality in the source text (e.g. "pointwise", "mainweight").
  std::string tag;
  std::vector<std::pair<std::string, double>> params;
  /// Max over the refinement of the per-grid constants.
  double empirical_constant = 0.0;
  Witness witness;
  std::vector<int> sizes;
  std::vector<double> lengths;
  std::vector<double> trend;
  /// stable | growing | violated
  std::string verdict;
  /// Points whose denominator fell below the floor, summed over the refinement.
  std::size_t excluded = 0;
  std::uint64_t seed = 0;
  /// Upper bound the constant must respect (Lemma-type tests), 0 when none.
  double bound = 0.0;

  double param(const std::string& key) const;
  std::string to_json() const;
  static std::string csv_header();
  std::string csv_row() const;
};

/// Refinement verdict: stable iff every constant is finite and max/min <= 2.
std::string refinement_verdict(const std::vector<double>& constants);
inline constexpr double kStableRatio = 2.0;
/// Denominators below kFloor times the problem scale are excluded.
inline constexpr double kFloor = 1e-12;

/// Running max of LHS/RHS ratios on one grid. Denominators at or below
/// kFloor * scale are excluded and counted; a zero denominator under a
/// nonzero numerator marks the inequality violated.
struct RatioTracker {
  double constant = 0.0;
  Witness witness;
  bool violated = false;
  std::size_t excluded = 0;

  void offer(double ratio, const std::string& function, const std::string& weight, const Point& x, int size);
  /// Ratios at every grid point.
  void pointwise(const GridSpec& spec, std::span<const double> lhs, std::span<const double> rhs, double scale,
                 const std::string& function, const std::string& weight);
  /// One ratio of integrals.
  void integral(const GridSpec& spec, double lhs, double rhs, double scale, const std::string& function,
                const std::string& weight);
};

/// Grids a test runs on: either refinements of one box (fixed length, N
/// grows) or growing boxes at fixed cell size.
struct RefinementPlan {
  int dim = 1;
  std::vector<int> sizes;
  /// Box length for each size.
  std::vector<double> lengths;
  std::uint64_t seed = 1;
  int per_octave = 8;
  /// When set, the corpus is cut down to these labels (witness replay).
  std::string only_function;
  std::string only_weight;

  std::vector<GridSpec> grids() const;
};

/// The witness's grid and corpus members only; rerunning the test on it
/// reproduces the reported constant.
RefinementPlan replay_plan(const RefinementPlan& plan, const Witness& witness);

/// N in {128, 256, 512} (d = 1) or {32, 64, 128} (d = 2) on one box.
RefinementPlan refinement_plan(int dim, double length, std::uint64_t seed = 1);
/// The same sizes with L proportional to N.
RefinementPlan growing_plan(int dim, double cell, std::uint64_t seed = 1);
/// Box length whose coarsest grid resolves the region of exponent alpha.
double default_length(int dim, double alpha);
/// Band of test frequencies on the plan's coarsest grid, inside the support
/// region when `support` is set.
Band test_band(const RefinementPlan& plan, double alpha, bool support);
/// Part of the support band where every frequency sees the whole profile of
/// phi at admissible scales: |xi| >= 2 (alpha > 0), |xi| <= 1/2 (alpha < 0).
/// Closer to |xi|^alpha = 1 the square function degenerates, so the reverse
/// estimates use this band.
Band reverse_band(const RefinementPlan& plan, double alpha);

// ---------------------------------------------------------------------------
// Inequalities. Each runs over a seeded corpus on every grid of the plan.

/// g_{alpha,beta}(T_m f)(x) <= C g*_{alpha,0,2 sigma/d}(f)(x); sigma > d/2.
/// The model multiplier m_{alpha,beta} (homogeneous) is used.
InequalityReport test_pointwise_thm1(double alpha, double beta, double sigma, const RefinementPlan& plan);
/// Same with m identically 1 (then beta = 0 gives C <= 2^{d lambda/2}).
InequalityReport test_pointwise_identity(double alpha, double sigma, const RefinementPlan& plan);
/// int |f|^2 w <= C int g_{alpha,beta}(f)^2 M_{alpha,beta} M^4 w.
InequalityReport test_reverse_thm2(double alpha, double beta, const RefinementPlan& plan);
/// int g*_{alpha,0,lambda}(f)^2 w <= C int |f|^2 M^2 w; lambda > 1.
InequalityReport test_forward_thm3(double alpha, double lambda, const RefinementPlan& plan);
/// int |T_m f|^2 w <= C int |f|^2 M^2 M_{alpha,beta} M^4 w with m_{alpha,beta}.
InequalityReport test_corollary4(double alpha, double beta, const RefinementPlan& plan);
/// Decoupling over the lattice partition, pointwise.
InequalityReport test_decoupling(double alpha, double beta, double lambda, const RefinementPlan& plan);
InequalityReport test_recoupling(double alpha, double beta, double lambda, const RefinementPlan& plan);
/// sum_l |f * nu_{k,l}|^2 <= C |f|^2 * |nu_k| pointwise, lattice cell 2^{(1-alpha)k}.
InequalityReport test_bessel_lemma(int k, double alpha, const RefinementPlan& plan);
/// int f h <= C R^d int (int_{B(x,1/R)} f)(sup_{B(x,1/R)} h) dx, radius
/// `radius_cells` cells; constant bounded by 1.5 * 2^d.
InequalityReport test_averaging_lemma(int radius_cells, const RefinementPlan& plan);
/// int s_phi(f)^2 w <= C int |f|^2 M w, and int |f|^2 w <= C int s_phi(f)^2 M^3 w.
std::vector<InequalityReport> test_classical_appendix(const RefinementPlan& plan);

/// Oscillatory kernel K_{a,b}: the pointwise and weighted estimates with
/// alpha = a/(a-1), beta = (da/2 - d + b)/(a-1).
InequalityReport test_oscillatory_pointwise(double a, double b, double lambda, const RefinementPlan& plan);
InequalityReport test_oscillatory_weighted(double a, double b, const RefinementPlan& plan);

/// Dispersive family: per-s local energy estimate against the global
/// maximal operator, its sup over s, the inhomogeneous variant, the
/// two-sided model, and the power-weight route.
std::vector<InequalityReport> test_dispersive(double alpha, double beta, const std::vector<double>& s_grid,
                                              const RefinementPlan& plan);
/// max over the grid of M_{alpha, gamma/2} w_gamma (global maximal operator).
InequalityReport test_power_weight(double alpha, double gamma, const RefinementPlan& plan);

/// sup over s and corpus of ||e^{is|D|^alpha} f||_q / ||f||_{H^beta-dot},
/// beta = d(1/2 - 1/q); the plan should grow the box.
InequalityReport test_strichartz_recovery(double alpha, double q, const RefinementPlan& plan);

/// ||f||_q / ||g_{alpha,beta}(f)||_p; beta defaults to the boundary of the
/// admissible region when NaN.
InequalityReport test_g_reverse_lp(double alpha, double beta, double p, double q, const RefinementPlan& plan);
/// Boundary beta of the reverse g-bound region.
double g_reverse_boundary(int dim, double alpha, double p, double q);

// ---------------------------------------------------------------------------
// Scans with a bounded / growing verdict.

/// beta on the sharp line of the L^p -> L^q bound for M_{alpha,beta}.
double sharp_line_beta(int dim, double alpha, double p, double q);
/// Empirical L^p -> L^q norms of M_{alpha,beta} over boxes of shrinking cell.
OpnormReport maximal_region_scan(int dim, double alpha, double beta, double p, double q, int levels = 4);
/// L^p norms of the homogeneous model m_{alpha,beta} on packets at the top of
/// each grid's band, d = 1.
OpnormReport miyachi_scan(double alpha, double beta, double p, int levels = 5);

// ---------------------------------------------------------------------------
// Pointwise chains.

struct ChainReport {
  std::string name;
  std::size_t points = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;
  double constant = 0.0;
};

/// g <= 2^{d lambda/2} g*, N <= C M, M <= global, regularised >= c_P M and
/// beta-monotonicity of M for alpha > 0, at every point, over the corpus.
std::vector<ChainReport> pointwise_chains(int dim, double alpha, double beta, double lambda,
                                          const RefinementPlan& plan);

}  // namespace subdyadic
