#include <atomic>
#include <cstdlib>
#include <string_view>

#include "subdyadic/simd.hpp"

namespace subdyadic::simd {

#ifdef SUBDYADIC_WITH_AVX2
namespace avx2 {
const Kernels& table();
}
#endif

const Kernels* avx2_kernels() {
#ifdef SUBDYADIC_WITH_AVX2
  return &avx2::table();
#else
  return nullptr;
#endif
}

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const Kernels* pick() {
  if (const char* env = std::getenv("SUBDYADIC_ISA"); env && std::string_view(env) == "scalar")
    return &scalar_kernels();
  if (avx2_kernels() && cpu_has_avx2()) return avx2_kernels();
  return &scalar_kernels();
}

std::atomic<const Kernels*>& active() {
  static std::atomic<const Kernels*> k{pick()};
  return k;
}

}  // namespace

const Kernels& kernels() { return *active().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (isa == Isa::avx2 && avx2_kernels() && cpu_has_avx2())
    active().store(avx2_kernels());
  else
    active().store(&scalar_kernels());
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

}  // namespace subdyadic::simd
