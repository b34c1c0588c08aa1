#pragma once

// Closed-form C-infinity cutoffs shared by the partition, symbol and
// maximal modules.

namespace subdyadic::cutoff {

/// Smooth step: 0 for x <= 0, 1 for x >= 1, e^{-1/x} / (e^{-1/x} + e^{-1/(1-x)}) between.
double smooth_step(double x);

/// Radial profile equal to 1 on [0, 1] and 0 on [2, inf).
double plateau(double rho);

/// Dyadic annulus piece plateau(rho) - plateau(2 rho); supported in (1/2, 2),
/// and sum over k of annulus(2^{-k} rho) = 1 for rho > 0.
double annulus(double rho);

/// One-dimensional bump on [-3/4, 3/4] whose integer translates sum to 1.
double lattice_bump(double x);
inline constexpr double kLatticeBumpHalfWidth = 0.75;

/// 1 on [0, a], 0 on [b, inf), smooth between (a < b).
double ramp_down(double x, double a, double b);

}  // namespace subdyadic::cutoff
