#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

// Elementwise kernels behind the spectral and square-function inner loops.
// A scalar reference table is always present; an AVX2 table is compiled in
// on x86-64 and selected at runtime when the CPU supports it.

namespace subdyadic::simd {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

struct Kernels {
  Isa isa;
  // out[i] = a[i] * b[i]
  void (*cmul)(const cplx* a, const cplx* b, cplx* out, std::size_t n);
  // out[i] = a[i] * r[i], r real
  void (*cmul_real)(const cplx* a, const double* r, cplx* out, std::size_t n);
  // out[i] = |a[i]|^2
  void (*abs2)(const cplx* a, double* out, std::size_t n);
  // y[i] += s * x[i]
  void (*axpy)(double s, const double* x, double* y, std::size_t n);
  // y[i] = max(y[i], x[i])
  void (*vmax)(const double* x, double* y, std::size_t n);
  // sum x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // sum |a[i]|^2 * w[i]
  double (*abs2_dot)(const cplx* a, const double* w, std::size_t n);
};

const Kernels& scalar_kernels();
/// Null when the AVX2 variant was not compiled in.
const Kernels* avx2_kernels();
bool cpu_has_avx2();

/// Kernels chosen for this process. Honors SUBDYADIC_ISA=scalar.
const Kernels& kernels();
/// Overrides the runtime choice (tests and benchmarks).
void force_isa(Isa isa);
std::string_view isa_name(Isa isa);

}  // namespace subdyadic::simd
