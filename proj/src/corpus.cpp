#include "subdyadic/corpus.hpp"

#include <algorithm>
#include <cmath>

namespace subdyadic {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Standard normal pair from two hashed uniforms (Box-Muller).
cplx hashed_gaussian(std::uint64_t seed, std::int64_t a, std::int64_t b, std::int64_t c) {
  const double u1 = std::max(hashed_uniform(seed, a, b, 2 * c), 1e-300);
  const double u2 = hashed_uniform(seed, a, b, 2 * c + 1);
  return std::polar(std::sqrt(-2.0 * std::log(u1)), kTwoPi * u2);
}

std::size_t nearest_cell(const GridSpec& spec, const Point& x) {
  const int i0 = spec.wrap(static_cast<int>(std::lround(x[0] / spec.cell())));
  const int i1 = spec.dim() == 2 ? spec.wrap(static_cast<int>(std::lround(x[1] / spec.cell()))) : 0;
  return spec.flat(i0, i1);
}

double min_image_norm(const GridSpec& spec, std::size_t i) {
  const auto a = spec.axis_indices(i);
  const double x0 = spec.min_image(a[0]) * spec.cell();
  const double x1 = spec.dim() == 2 ? spec.min_image(a[1]) * spec.cell() : 0.0;
  return std::hypot(x0, x1);
}

FunctionSpec packet(std::string label, Point center, Point carrier, double width) {
  FunctionSpec f;
  f.label = std::move(label);
  f.amplitude = [=](const Point& xi) {
    const double d0 = xi[0] - carrier[0], d1 = xi[1] - carrier[1];
    const double env = std::exp(-0.5 * width * width * (d0 * d0 + d1 * d1));
    return std::polar(env, -(xi[0] * center[0] + xi[1] * center[1]));
  };
  return f;
}

}  // namespace

double hashed_uniform(std::uint64_t seed, std::int64_t a, std::int64_t b, std::int64_t c) {
  std::uint64_t h = splitmix(seed);
  h = splitmix(h ^ static_cast<std::uint64_t>(a));
  h = splitmix(h ^ static_cast<std::uint64_t>(b));
  h = splitmix(h ^ static_cast<std::uint64_t>(c));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

Band support_band(double alpha, Band b) {
  if (alpha > 0.0) b.lo = std::max(b.lo, 1.0);
  if (alpha < 0.0) b.hi = std::min(b.hi, 1.0);
  if (!(b.lo > 0.0 && b.lo <= b.hi)) throw Error("support_band: no frequencies satisfy the support condition");
  return b;
}

GridFunction FunctionSpec::realize(const GridSpec& spec, const Band& band) const {
  if (band.hi > spec.nyquist() / 2.0 * (1.0 + 1e-12))
    throw Error("corpus: band reaches past half the Nyquist frequency of the grid");
  Spectrum s{spec, std::vector<cplx>(spec.size())};
  // Coefficient of a mode in the unitary transform of sum_xi A e^{i xi x}.
  const double mode_scale = std::pow(static_cast<double>(spec.n()), spec.dim() / 2.0);
  if (is_tone) {
    std::size_t best = 0;
    double best_d = 1e300;
    for (std::size_t i = 1; i < spec.size(); ++i) {
      const Point xi = spec.frequency(i);
      if (!band.contains(spec.frequency_norm(i))) continue;
      const double d = std::hypot(xi[0] - tone[0], xi[1] - tone[1]);
      if (d < best_d - 1e-12) {
        best_d = d;
        best = i;
      }
    }
    if (best == 0) throw Error("corpus: tone '" + label + "' has no lattice frequency in the band");
    s.coeffs[best] = mode_scale;
    return inverse_transform(s);
  }
  const double dxi = std::pow(spec.freq_step(), spec.dim());
  for (std::size_t i = 1; i < spec.size(); ++i)
    if (band.contains(spec.frequency_norm(i))) s.coeffs[i] = mode_scale * dxi * amplitude(spec.frequency(i));
  return inverse_transform(s);
}

std::vector<GridFunction> TestCorpus::sample_functions(const GridSpec& spec) const {
  std::vector<GridFunction> out;
  out.reserve(functions.size());
  for (const auto& f : functions) out.push_back(f.realize(spec, options.band));
  return out;
}

std::vector<Weight> TestCorpus::sample_weights(const GridSpec& spec) const {
  std::vector<Weight> out;
  out.reserve(weights.size());
  for (const auto& w : weights) out.push_back(w.make(spec));
  return out;
}

TestCorpus TestCorpus::restricted(const std::string& function, const std::string& weight) const {
  TestCorpus c;
  c.options = options;
  for (const auto& f : functions)
    if (f.label == function) c.functions.push_back(f);
  for (const auto& w : weights)
    if (w.label == weight) c.weights.push_back(w);
  return c;
}

Weight power_weight(const GridSpec& spec, double gamma) {
  std::vector<double> v(spec.size());
  const double floor = spec.cell() / 2.0;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(std::max(min_image_norm(spec, i), floor), -gamma);
  return Weight(spec, std::move(v));
}

TestCorpus make_corpus(const CorpusOptions& opt) {
  if (opt.dim != 1 && opt.dim != 2) throw Error("corpus: dim must be 1 or 2");
  if (!(opt.band.lo > 0.0 && opt.band.lo <= opt.band.hi)) throw Error("corpus: bad band");
  TestCorpus c;
  c.options = opt;
  const Band b = opt.band;
  const double mid = 0.5 * (b.lo + b.hi);
  const double span = b.hi - b.lo;

  for (const auto& [name, rho] : {std::pair<const char*, double>{"tone_low", b.lo}, {"tone_high", b.hi}}) {
    FunctionSpec t;
    t.label = name;
    t.is_tone = true;
    t.tone = {rho, 0.0};
    c.functions.push_back(t);
  }
  if (opt.dim == 2) {
    FunctionSpec t;
    t.label = "tone_diagonal";
    t.is_tone = true;
    t.tone = {mid / std::sqrt(2.0), mid / std::sqrt(2.0)};
    c.functions.push_back(t);
  }
  for (int r = 0; r < opt.random_count; ++r) {
    FunctionSpec f;
    f.label = "random_" + std::to_string(r);
    const std::uint64_t seed = opt.seed;
    f.amplitude = [seed, r](const Point& xi) {
      // Keyed on the frequency itself, so a refinement sees the same amplitudes.
      const auto k0 = static_cast<std::int64_t>(std::llround(xi[0] * 1e6));
      const auto k1 = static_cast<std::int64_t>(std::llround(xi[1] * 1e6));
      return hashed_gaussian(seed, k0, k1, r);
    };
    c.functions.push_back(f);
  }
  // Packets: one well inside the band, one at its upper edge, off-centre.
  const double width = 4.0 / std::max(span, 1e-3);
  c.functions.push_back(packet("packet_mid", {0.0, 0.0}, {mid, 0.0}, width));
  c.functions.push_back(packet("packet_edge", {1.5, opt.dim == 2 ? -1.0 : 0.0},
                               {b.hi - 0.15 * span, opt.dim == 2 ? 0.1 * span : 0.0}, width));
  if (opt.chirps) {
    const double a = opt.chirp_alpha;
    for (double s : {0.5, 1.0}) {
      FunctionSpec f = packet("chirp_" + std::to_string(s).substr(0, 3), {0.0, 0.0}, {mid, 0.0}, 0.5 * width);
      auto base = f.amplitude;
      f.amplitude = [base, a, s](const Point& xi) {
        return base(xi) * std::polar(1.0, -s * std::pow(std::hypot(xi[0], xi[1]), a));
      };
      c.functions.push_back(f);
    }
  }

  c.weights.push_back({"constant", [](const GridSpec& s) { return Weight::constant(s, 1.0); }});
  c.weights.push_back({"spike_origin", [](const GridSpec& s) {
                         std::vector<double> v(s.size(), 0.0);
                         v[nearest_cell(s, {0.0, 0.0})] = 1.0;
                         return Weight(s, std::move(v));
                       }});
  c.weights.push_back({"spike_offset", [](const GridSpec& s) {
                         std::vector<double> v(s.size(), 0.0);
                         v[nearest_cell(s, {s.length() / 4.0, s.length() / 4.0})] = 1.0;
                         return Weight(s, std::move(v));
                       }});
  c.weights.push_back({"indicator", [](const GridSpec& s) {
                         return Weight::sample(s, [&](const Point& x) {
                           const double c0 = s.length() / 2.0, r = s.length() / 8.0;
                           const bool in0 = std::abs(x[0] - c0) <= r;
                           const bool in1 = s.dim() == 1 || std::abs(x[1] - c0) <= r;
                           return in0 && in1 ? 1.0 : 0.0;
                         });
                       }});
  c.weights.push_back({"power_0.5", [](const GridSpec& s) { return power_weight(s, 0.5); }});
  const std::uint64_t seed = opt.seed;
  c.weights.push_back({"random", [seed](const GridSpec& s) {
                         std::vector<double> v(s.size());
                         for (std::size_t i = 0; i < v.size(); ++i)
                           v[i] = hashed_uniform(seed ^ 0x5eedULL, s.n(), static_cast<std::int64_t>(i));
                         return Weight(s, std::move(v));
                       }});
  return c;
}

}  // namespace subdyadic
