#pragma once

#include <string_view>

namespace bcosfire {

/// Instruction set used by the inner loops. Every variant produces
/// bitwise-identical results to the scalar reference.
enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

/// True when the variant is compiled in and the CPU supports it.
bool isa_available(Isa isa);

/// Best available variant, unless overridden by set_isa() or the
/// BCOSFIRE_ISA environment variable ("scalar" / "avx2").
Isa active_isa();

/// Forces a variant for the whole process (tests use this to compare
/// paths). Throws ParameterError if the variant is unavailable.
void set_isa(Isa isa);

/// RAII override used by tests.
class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa);
  ~ScopedIsa();
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  Isa previous_;
};

}  // namespace bcosfire
