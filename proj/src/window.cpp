#include "subdyadic/window.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include "subdyadic/simd.hpp"

namespace subdyadic {

bool Window::contains(const GridSpec& spec, double radius, int o0, int o1) {
  const double h = spec.cell();
  const double r2 = (static_cast<double>(o0) * o0 + static_cast<double>(o1) * o1) * h * h;
  return r2 <= radius * radius * (1.0 + 1e-12);
}

namespace {

// Largest w in [0, N/2] with (o0, w) inside, or -1 if (o0, 0) is outside.
int half_width(const GridSpec& spec, double radius, int o0) {
  if (!Window::contains(spec, radius, o0, 0)) return -1;
  const int cap = spec.n() / 2;
  const double t = radius / spec.cell();
  int w = static_cast<int>(std::min<double>(cap, std::floor(std::sqrt(std::max(0.0, t * t - double(o0) * o0)))));
  while (w < cap && Window::contains(spec, radius, o0, w + 1)) ++w;
  while (w > 0 && !Window::contains(spec, radius, o0, w)) --w;
  return w;
}

}  // namespace

Window::Window(const GridSpec& spec, double radius) : radius_(radius), n_(spec.n()) {
  if (!(radius >= 0.0)) throw Error("Window: radius must be nonnegative");
  const int half = n_ / 2;
  if (spec.dim() == 1) {
    const int w = half_width(spec, radius, 0);
    rows_.push_back(0);
    widths_.push_back(w);
    count_ = w >= half ? n_ : 2 * w + 1;
    return;
  }
  for (int o0 = -half + 1; o0 <= half; ++o0) {
    const int w = half_width(spec, radius, o0);
    if (w < 0) continue;
    rows_.push_back(o0);
    widths_.push_back(w);
    count_ += w >= half ? n_ : 2 * w + 1;
  }
}

namespace {

// Sums over columns [c - w, c + w] of one periodic row, via a prefix table
// over three copies of the row (column j stored at j + N).
struct RowPrefix {
  int n;
  std::vector<double> p;

  RowPrefix(const double* row, int n_) : n(n_), p(3 * n_ + 1, 0.0) {
    for (int k = 0; k < 3 * n; ++k) p[k + 1] = p[k] + row[k % n];
  }
  double total() const { return p[n + n] - p[n]; }
  double range(int c, int w) const { return p[c + w + n + 1] - p[c - w + n]; }
};

// out[c] = max of row over [c - w, c + w], periodic; monotone deque.
void sliding_max_row(const double* row, int n, int w, double* out) {
  if (2 * w + 1 >= n) {
    const double m = *std::max_element(row, row + n);
    std::fill(out, out + n, m);
    return;
  }
  std::deque<int> dq;  // positions in extended coordinates, values decreasing
  auto val = [&](int j) { return row[((j % n) + n) % n]; };
  for (int j = -w; j < n + w; ++j) {
    while (!dq.empty() && val(dq.back()) <= val(j)) dq.pop_back();
    dq.push_back(j);
    const int c = j - w;
    if (c < 0) continue;
    while (dq.front() < c - w) dq.pop_front();
    out[c] = val(dq.front());
  }
}

}  // namespace

std::vector<double> window_sum(const GridSpec& spec, std::span<const double> values, const Window& win) {
  if (values.size() != spec.size()) throw Error("window_sum: size mismatch");
  const int n = spec.n();
  std::vector<double> out(spec.size(), 0.0);
  if (spec.dim() == 1) {
    RowPrefix pre(values.data(), n);
    const int w = win.half_widths()[0];
    for (int c = 0; c < n; ++c) out[c] = win.full_row(0) ? pre.total() : pre.range(c, w);
    return out;
  }
  std::vector<RowPrefix> pre;
  pre.reserve(n);
  for (int r = 0; r < n; ++r) pre.emplace_back(values.data() + static_cast<std::size_t>(r) * n, n);
  const auto rows = win.row_offsets();
  const auto widths = win.half_widths();
  for (int x0 = 0; x0 < n; ++x0) {
    double* o = out.data() + static_cast<std::size_t>(x0) * n;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const RowPrefix& rp = pre[spec.wrap(x0 + rows[i])];
      if (win.full_row(i)) {
        const double t = rp.total();
        for (int c = 0; c < n; ++c) o[c] += t;
      } else {
        for (int c = 0; c < n; ++c) o[c] += rp.range(c, widths[i]);
      }
    }
  }
  return out;
}

std::vector<double> window_max(const GridSpec& spec, std::span<const double> values, const Window& win) {
  if (values.size() != spec.size()) throw Error("window_max: size mismatch");
  const int n = spec.n();
  if (spec.dim() == 1) {
    std::vector<double> out(n);
    sliding_max_row(values.data(), n, win.half_widths()[0], out.data());
    return out;
  }
  std::vector<double> out(spec.size(), -INFINITY);
  std::map<int, std::vector<int>> by_width;
  for (std::size_t i = 0; i < win.row_offsets().size(); ++i)
    by_width[std::min(win.half_widths()[i], n / 2)].push_back(win.row_offsets()[i]);
  const auto& vk = simd::kernels();
  std::vector<double> rowmax(spec.size());
  for (const auto& [w, offsets] : by_width) {
    for (int r = 0; r < n; ++r)
      sliding_max_row(values.data() + static_cast<std::size_t>(r) * n, n, w,
                      rowmax.data() + static_cast<std::size_t>(r) * n);
    for (int x0 = 0; x0 < n; ++x0)
      for (int o0 : offsets)
        vk.vmax(rowmax.data() + static_cast<std::size_t>(spec.wrap(x0 + o0)) * n,
                out.data() + static_cast<std::size_t>(x0) * n, n);
  }
  return out;
}

}  // namespace subdyadic
