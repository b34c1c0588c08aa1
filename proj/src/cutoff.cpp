#include "subdyadic/cutoff.hpp"

#include <cmath>

namespace subdyadic::cutoff {

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x);
  const double b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

double plateau(double rho) {
  if (rho <= 1.0) return 1.0;
  if (rho >= 2.0) return 0.0;
  return 1.0 - smooth_step(rho - 1.0);
}

double annulus(double rho) { return plateau(rho) - plateau(2.0 * rho); }

namespace {

// Rises from 0 at y = -w to 1 at y = w.
double rise(double y) {
  constexpr double w = 0.25;
  return smooth_step((y + w) / (2.0 * w));
}

}  // namespace

// rise(x + 1/2) - rise(x - 1/2) telescopes over integer translates.
double lattice_bump(double x) { return rise(x + 0.5) - rise(x - 0.5); }

double ramp_down(double x, double a, double b) {
  if (x <= a) return 1.0;
  if (x >= b) return 0.0;
  return 1.0 - smooth_step((x - a) / (b - a));
}

}  // namespace subdyadic::cutoff
