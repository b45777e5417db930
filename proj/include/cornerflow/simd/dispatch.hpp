// SPDX-License-Identifier: Apache-2.0
//
// Runtime selection between the scalar reference kernels and their AVX2
// variants. The scalar path is always compiled and is the numerical reference;
// vector variants must agree with it to rounding (see tests/test_simd.cpp).
#pragma once

#include <string_view>

namespace cornerflow::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa) noexcept;

/// Widest instruction set both compiled in and supported by this CPU.
Isa best_available_isa() noexcept;
bool isa_available(Isa isa) noexcept;

/// Kernel set used by the solvers. Defaults to best_available_isa(), or to the
/// value of the CORNERFLOW_ISA environment variable ("scalar" / "avx2").
Isa active_isa() noexcept;
/// Throws unsupported when the requested variant is not available.
void set_active_isa(Isa isa);

/// Restores the previous selection on destruction; used by equivalence tests.
class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa) : previous_(active_isa()) { set_active_isa(isa); }
  ~ScopedIsa() { set_active_isa(previous_); }
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  Isa previous_;
};

}  // namespace cornerflow::simd
