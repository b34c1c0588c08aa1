#pragma once

// Exhaustive loops over every (x, r, y, z) for the maximal operators. They
// share only the membership predicates and the radius grid with the library
// (those are definitions); the summation and the sup are done naively.

#include <cmath>
#include <vector>

#include "subdyadic/maximal.hpp"
#include "subdyadic/window.hpp"

namespace oracle {

using subdyadic::GridSpec;
using subdyadic::Weight;

inline int off(const GridSpec& s, int a, int b) { return s.min_image(a - b); }

/// (sum of w over the lattice ball B(y, r), lattice count of the ball)
inline std::pair<double, std::size_t> ball(const Weight& w, std::size_t y, double r) {
  const GridSpec& s = w.spec();
  const auto yi = s.axis_indices(y);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t z = 0; z < s.size(); ++z) {
    const auto zi = s.axis_indices(z);
    const int o1 = s.dim() == 2 ? off(s, zi[1], yi[1]) : 0;
    if (subdyadic::Window::contains(s, r, off(s, zi[0], yi[0]), o1)) {
      sum += w[z];
      ++count;
    }
  }
  return {sum, count};
}

inline bool near(const GridSpec& s, std::size_t x, std::size_t y, double reach) {
  const auto xi = s.axis_indices(x), yi = s.axis_indices(y);
  return subdyadic::Window::contains(s, reach, off(s, yi[0], xi[0]), s.dim() == 2 ? off(s, yi[1], xi[1]) : 0);
}

/// sup over radii r (filtered by keep) and centers y within reach(r) of x of
/// factor(r) times the lattice average of w over B(y, ball_radius(r)).
template <typename Keep, typename Reach, typename BallRadius, typename Factor>
std::vector<double> region_sup(const Weight& w, Keep keep, Reach reach, BallRadius ball_radius, Factor factor) {
  const GridSpec& s = w.spec();
  std::vector<double> out(s.size(), 0.0);
  for (double r : subdyadic::radius_grid(s)) {
    if (!keep(r)) continue;
    std::vector<double> avg(s.size());
    for (std::size_t y = 0; y < s.size(); ++y) {
      auto [sum, count] = ball(w, y, ball_radius(r));
      avg[y] = factor(r) * (sum / static_cast<double>(count));
    }
    const double reach_r = reach(r);
    for (std::size_t x = 0; x < s.size(); ++x)
      for (std::size_t y = 0; y < s.size(); ++y)
        if ((reach_r < 0.0 ? x == y : near(s, x, y, reach_r))) out[x] = std::max(out[x], avg[y]);
  }
  return out;
}

inline std::vector<double> hl(const Weight& w) {
  return region_sup(
      w, [](double) { return true; }, [](double) { return -1.0; }, [](double r) { return r; },
      [](double) { return 1.0; });
}

inline std::vector<double> fractional(const Weight& w, double beta) {
  const GridSpec& s = w.spec();
  std::vector<double> out(s.size(), 0.0);
  for (double r : subdyadic::radius_grid(s))
    for (std::size_t x = 0; x < s.size(); ++x)
      out[x] = std::max(out[x], ball(w, x, r).first * s.cell_volume() * std::pow(r, 2.0 * beta - s.dim()));
  return out;
}

inline std::vector<double> subdyadic_max(const Weight& w, double alpha, double beta) {
  return region_sup(
      w, [&](double r) { return std::pow(r, alpha) <= 1.0 + 1e-12; },
      [&](double r) { return std::pow(r, 1.0 - alpha); }, [](double r) { return r; },
      [&](double r) { return std::pow(r, 2.0 * beta); });
}

inline std::vector<double> global_max(const Weight& w, double alpha, double beta, double sv) {
  return region_sup(
      w, [](double) { return true; }, [&](double r) { return sv * std::pow(r, 1.0 - alpha); },
      [](double r) { return r; }, [&](double r) { return std::pow(r, 2.0 * beta); });
}

inline std::vector<double> inhomogeneous(const Weight& w, double alpha, double beta, double sv) {
  const double dil = std::pow(sv, 1.0 / alpha);
  return region_sup(
      w, [](double r) { return r <= 1.0 + 1e-12; }, [&](double r) { return dil * std::pow(r, 1.0 - alpha); },
      [&](double r) { return dil * r; }, [&](double r) { return std::pow(r, 2.0 * beta); });
}

inline std::vector<double> nikodym(const Weight& w, double alpha, double beta) {
  const GridSpec& s = w.spec();
  std::vector<double> out(s.size(), 0.0);
  auto inside = [&](std::size_t p, std::size_t c, double r, double len, double a) {
    const auto pi = s.axis_indices(p), ci = s.axis_indices(c);
    return subdyadic::tube_contains(s, r, len, a, off(s, pi[0], ci[0]), off(s, pi[1], ci[1]));
  };
  for (double r : subdyadic::admissible_radii(s, alpha)) {
    const double len = std::pow(r, 1.0 - alpha);
    for (double a : subdyadic::tube_angles(r, alpha)) {
      for (std::size_t c = 0; c < s.size(); ++c) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t z = 0; z < s.size(); ++z)
          if (inside(z, c, r, len, a)) {
            sum += w[z];
            ++count;
          }
        const double v = std::pow(r, 2.0 * beta) * (sum / static_cast<double>(count));
        for (std::size_t x = 0; x < s.size(); ++x)
          if (inside(x, c, r, len, a)) out[x] = std::max(out[x], v);
      }
    }
  }
  return out;
}

/// Direct (non-FFT) convolution with P_r, then the region sup.
inline std::vector<double> regularised(const Weight& w, double alpha, double beta,
                                       const subdyadic::RadialProfile& prof) {
  const GridSpec& s = w.spec();
  std::vector<double> out(s.size(), 0.0);
  for (double r : subdyadic::admissible_radii(s, alpha)) {
    std::vector<double> conv(s.size(), 0.0);
    for (std::size_t y = 0; y < s.size(); ++y) {
      const auto yi = s.axis_indices(y);
      for (std::size_t z = 0; z < s.size(); ++z) {
        const auto zi = s.axis_indices(z);
        const double o0 = off(s, yi[0], zi[0]), o1 = s.dim() == 2 ? off(s, yi[1], zi[1]) : 0;
        conv[y] += s.cell_volume() * std::pow(r, -s.dim()) * prof.fn(std::hypot(o0, o1) * s.cell() / r) * w[z];
      }
    }
    const double reach = std::pow(r, 1.0 - alpha);
    for (std::size_t x = 0; x < s.size(); ++x)
      for (std::size_t y = 0; y < s.size(); ++y)
        if (near(s, x, y, reach)) out[x] = std::max(out[x], std::pow(r, 2.0 * beta) * conv[y]);
  }
  return out;
}

inline std::vector<double> running_sup(const Weight& w, double t) {
  const GridSpec& s = w.spec();
  std::vector<double> radii{t};
  for (double r : subdyadic::radius_grid(s))
    if (r > t) radii.push_back(r);
  std::vector<double> out(s.size(), 0.0);
  for (double r : radii)
    for (std::size_t x = 0; x < s.size(); ++x) {
      auto [sum, count] = ball(w, x, r);
      out[x] = std::max(out[x], sum / static_cast<double>(count));
    }
  return out;
}

}  // namespace oracle
