#include <atomic>
#include <cstdlib>
#include <string>

#include "bcosfire/error.hpp"
#include "kernels/kernels.hpp"

namespace bcosfire {

namespace {

Isa detect_best() {
#if defined(BCOSFIRE_WITH_AVX2)
  if (__builtin_cpu_supports("avx2")) return Isa::Avx2;
#endif
  return Isa::Scalar;
}

Isa initial_isa() {
  if (const char* env = std::getenv("BCOSFIRE_ISA")) {
    const std::string name = env;
    if (name == "scalar") return Isa::Scalar;
    if (name == "avx2" && isa_available(Isa::Avx2)) return Isa::Avx2;
  }
  return detect_best();
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(BCOSFIRE_WITH_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw ParameterError("instruction set '" + std::string(isa_name(isa)) +
                         "' is not available");
  }
  current().store(isa, std::memory_order_relaxed);
}

ScopedIsa::ScopedIsa(Isa isa) : previous_(active_isa()) { set_isa(isa); }
ScopedIsa::~ScopedIsa() { current().store(previous_, std::memory_order_relaxed); }

namespace kernels {

const KernelTable& active() {
#if defined(BCOSFIRE_WITH_AVX2)
  if (active_isa() == Isa::Avx2) return avx2_table();
#endif
  return scalar_table();
}

}  // namespace kernels

}  // namespace bcosfire
