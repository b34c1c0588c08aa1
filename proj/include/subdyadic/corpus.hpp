#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "subdyadic/grid.hpp"

namespace subdyadic {

/// Radial frequency band lo <= |xi| <= hi (lo > 0, so every member is mean zero).
struct Band {
  double lo = 1.0;
  double hi = 2.0;
  bool contains(double rho) const { return rho >= lo && rho <= hi; }
};

/// Part of [lo, hi] meeting the support condition |xi|^alpha >= 1; throws when empty.
Band support_band(double alpha, Band b);

/// A test function given by its Fourier amplitude A(xi) on the lattice
/// frequencies of a box: f(x) = (2 pi / L)^d sum_{xi in band} A(xi) e^{i xi.x}.
/// On boxes of one length every refinement samples the same trigonometric
/// polynomial. A tone puts unit amplitude on the lattice frequency nearest
/// `tone`.
struct FunctionSpec {
  std::string label;
  std::function<cplx(const Point&)> amplitude;
  bool is_tone = false;
  Point tone{0.0, 0.0};

  /// Throws when the band reaches past half the Nyquist frequency of the grid.
  GridFunction realize(const GridSpec& spec, const Band& band) const;
};

struct WeightSpec {
  std::string label;
  std::function<Weight(const GridSpec&)> make;
};

struct CorpusOptions {
  int dim = 1;
  Band band;
  std::uint64_t seed = 1;
  int random_count = 2;
  /// Add pre-dispersed packets that e^{i s |xi|^alpha}-type multipliers refocus.
  bool chirps = false;
  double chirp_alpha = 2.0;
};

struct TestCorpus {
  CorpusOptions options;
  std::vector<FunctionSpec> functions;
  std::vector<WeightSpec> weights;

  std::vector<GridFunction> sample_functions(const GridSpec& spec) const;
  std::vector<Weight> sample_weights(const GridSpec& spec) const;
  /// Copy restricted to the named members (witness replay).
  TestCorpus restricted(const std::string& function, const std::string& weight) const;
};

/// Tones at both ends of the band, seeded random multi-tones, modulated
/// Gaussian packets and (optionally) chirps; weights: constant, single-cell
/// spikes, an interval/square indicator, the truncated power weight with
/// gamma = 1/2 and a seeded random field.
TestCorpus make_corpus(const CorpusOptions& opt);

/// |x|^{-gamma} about the origin (minimum image), with |x| floored at h/2.
Weight power_weight(const GridSpec& spec, double gamma);

/// Deterministic uniform in [0, 1) from (seed, a, b, c); independent of the
/// standard library's distribution implementations.
double hashed_uniform(std::uint64_t seed, std::int64_t a, std::int64_t b = 0, std::int64_t c = 0);

}  // namespace subdyadic
