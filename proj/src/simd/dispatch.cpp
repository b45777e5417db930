// SPDX-License-Identifier: Apache-2.0
#include "cornerflow/simd/dispatch.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "cornerflow/error.hpp"

namespace cornerflow::simd {

namespace {

Isa initial_isa() noexcept {
  if (const char* env = std::getenv("CORNERFLOW_ISA")) {
    const std::string v(env);
    if (v == "scalar") return Isa::scalar;
    if (v == "avx2" && isa_available(Isa::avx2)) return Isa::avx2;
  }
  return best_available_isa();
}

std::atomic<Isa>& selection() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(CORNERFLOW_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa best_available_isa() noexcept { return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar; }

Isa active_isa() noexcept { return selection().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw Error(ErrorKind::unsupported, std::string("instruction set not available: ") + std::string(to_string(isa)));
  }
  selection().store(isa, std::memory_order_relaxed);
}

}  // namespace cornerflow::simd
