#include <immintrin.h>

#include "subdyadic/simd.hpp"

namespace subdyadic::simd {
namespace avx2 {
namespace {

// std::complex<double> is two contiguous doubles; a __m256d holds two of them.

void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  double* po = reinterpret_cast<double*>(out);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(pa + 2 * i);
    __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    __m256d br = _mm256_movedup_pd(vb);            // br br
    __m256d bi = _mm256_permute_pd(vb, 0xF);       // bi bi
    __m256d sw = _mm256_permute_pd(va, 0x5);       // ai ar
    __m256d t1 = _mm256_mul_pd(va, br);            // ar*br ai*br
    __m256d t2 = _mm256_mul_pd(sw, bi);            // ai*bi ar*bi
    _mm256_storeu_pd(po + 2 * i, _mm256_addsub_pd(t1, t2));
  }
  for (; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    out[i] = cplx(ar * br - ai * bi, ar * bi + ai * br);
  }
}

void cmul_real(const cplx* a, const double* r, cplx* out, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  double* po = reinterpret_cast<double*>(out);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m128d rr = _mm_loadu_pd(r + i);                       // r0 r1
    __m256d rv = _mm256_set_m128d(_mm_unpackhi_pd(rr, rr), _mm_unpacklo_pd(rr, rr));
    _mm256_storeu_pd(po + 2 * i, _mm256_mul_pd(_mm256_loadu_pd(pa + 2 * i), rv));
  }
  for (; i < n; ++i) out[i] = cplx(a[i].real() * r[i], a[i].imag() * r[i]);
}

void abs2(const cplx* a, double* out, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v0 = _mm256_loadu_pd(pa + 2 * i);
    __m256d v1 = _mm256_loadu_pd(pa + 2 * i + 4);
    __m256d s0 = _mm256_mul_pd(v0, v0);
    __m256d s1 = _mm256_mul_pd(v1, v1);
    // hadd gives (s0[0]+s0[1], s1[0]+s1[1], s0[2]+s0[3], s1[2]+s1[3])
    __m256d h = _mm256_hadd_pd(s0, s1);
    __m256d p = _mm256_permute4x64_pd(h, 0xD8);
    _mm256_storeu_pd(out + i, p);
  }
  for (; i < n; ++i) {
    const double re = a[i].real(), im = a[i].imag();
    out[i] = re * re + im * im;
  }
}

void axpy(double s, const double* x, double* y, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_add_pd(vy, _mm256_mul_pd(vs, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += s * x[i];
}

void vmax(const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vx = _mm256_loadu_pd(x + i);
    __m256d vy = _mm256_loadu_pd(y + i);
    // max(x, y) with y kept on ties and NaN-free inputs, as in the scalar loop
    __m256d gt = _mm256_cmp_pd(vx, vy, _CMP_GT_OQ);
    _mm256_storeu_pd(y + i, _mm256_blendv_pd(vy, vx, gt));
  }
  for (; i < n; ++i) y[i] = x[i] > y[i] ? x[i] : y[i];
}

double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double abs2_dot(const cplx* a, const double* w, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d v = _mm256_loadu_pd(pa + 2 * i);
    __m128d ww = _mm_loadu_pd(w + i);
    __m256d wv = _mm256_set_m128d(_mm_unpackhi_pd(ww, ww), _mm_unpacklo_pd(ww, ww));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_mul_pd(v, v), wv));
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double re = a[i].real(), im = a[i].imag();
    s += (re * re + im * im) * w[i];
  }
  return s;
}

constexpr Kernels kAvx2{Isa::avx2, cmul, cmul_real, abs2, axpy, vmax, dot, abs2_dot};

}  // namespace

const Kernels& table() { return kAvx2; }

}  // namespace avx2
}  // namespace subdyadic::simd
