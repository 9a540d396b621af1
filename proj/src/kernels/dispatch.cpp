// Copyright 2026  The drbss Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"

namespace drbss::kernels {
namespace {

bool cpu_has(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(DRBSS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(DRBSS_HAVE_NEON)
      return true;  // Advanced SIMD is mandatory on aarch64.
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* select_default() {
  const char* env = std::getenv("DRBSS_SIMD");
  const std::string pref = env ? env : "auto";
  if (pref == "scalar") return &detail::kScalarTable;
  if (pref == "avx2") {
    if (const KernelTable* t = isa_table(Isa::Avx2)) return t;
  } else if (pref == "neon") {
    if (const KernelTable* t = isa_table(Isa::Neon)) return t;
  }
  if (const KernelTable* t = isa_table(Isa::Avx2)) return t;
  if (const KernelTable* t = isa_table(Isa::Neon)) return t;
  return &detail::kScalarTable;
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

const KernelTable& scalar_table() { return detail::kScalarTable; }

const KernelTable* isa_table(Isa isa) {
  if (!cpu_has(isa)) return nullptr;
  switch (isa) {
    case Isa::Scalar:
      return &detail::kScalarTable;
    case Isa::Avx2:
#if defined(DRBSS_HAVE_AVX2)
      return &detail::kAvx2Table;
#else
      return nullptr;
#endif
    case Isa::Neon:
#if defined(DRBSS_HAVE_NEON)
      return &detail::kNeonTable;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable& active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (!t) {
    t = select_default();
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

void set_active(Isa isa) {
  const KernelTable* t = isa_table(isa);
  g_active.store(t ? t : &detail::kScalarTable, std::memory_order_release);
}

std::string_view active_name() { return active().name; }

}  // namespace drbss::kernels
