#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "subdyadic/grid.hpp"
#include "subdyadic/simd.hpp"

namespace subdyadic::detail {

// Transform of a kernel given on minimum-image offsets (in length units).
template <typename KernelAt>
std::vector<cplx> kernel_transform(const GridSpec& spec, KernelAt k) {
  std::vector<cplx> v(spec.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto idx = spec.axis_indices(i);
    const double o0 = spec.min_image(idx[0]) * spec.cell();
    const double o1 = spec.dim() == 2 ? spec.min_image(idx[1]) * spec.cell() : 0.0;
    v[i] = k(o0, o1);
  }
  fft_inplace(spec, v, false);
  return v;
}

// Circular convolution of real fields, out[x] = sum_o kernel[o] e[x - o],
// clamped at zero since both factors are nonnegative.
inline void convolve(const GridSpec& spec, const std::vector<cplx>& kernel_hat, const std::vector<double>& e,
                     std::vector<double>& out) {
  std::vector<cplx> buf(e.begin(), e.end());
  fft_inplace(spec, buf, false);
  simd::kernels().cmul(buf.data(), kernel_hat.data(), buf.data(), buf.size());
  fft_inplace(spec, buf, true);
  const double scale = std::sqrt(static_cast<double>(spec.size()));
  out.resize(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) out[i] = std::max(0.0, buf[i].real() * scale);
}

}  // namespace subdyadic::detail
