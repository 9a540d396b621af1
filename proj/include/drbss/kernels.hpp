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

// Data-parallel inner loops shared by every update rule. Each kernel has a
// scalar reference implementation and optional SIMD variants; one table is
// selected at first use from the CPU features, or forced through the
// DRBSS_SIMD environment variable (scalar | avx2 | neon | auto).
//
// Complex buffers are std::complex<double>, i.e. interleaved (re, im) pairs.

#ifndef DRBSS_KERNELS_HPP_
#define DRBSS_KERNELS_HPP_

#include <cstddef>
#include <span>
#include <string_view>

#include "drbss/common.hpp"

namespace drbss::kernels {

struct KernelTable {
  const char* name;
  /// sum_t w[t] * a[t] * conj(b[t])
  cplx (*cdotw)(const cplx* a, const cplx* b, const double* w, std::size_t n);
  /// sum_t w[t] * |a[t]|^2
  double (*cnorm2w)(const cplx* a, const double* w, std::size_t n);
  /// y[t] += alpha * x[t]
  void (*caxpy)(cplx* y, cplx alpha, const cplx* x, std::size_t n);
  /// out[t] = |a[t]|^2
  void (*cabs2)(const cplx* a, double* out, std::size_t n);
  /// sum_t a[t] * b[t]
  double (*ddot)(const double* a, const double* b, std::size_t n);
  /// y[t] += alpha * x[t]
  void (*daxpy)(double* y, double alpha, const double* x, std::size_t n);
};

enum class Isa { Scalar, Avx2, Neon };

const KernelTable& scalar_table();
/// nullptr when the ISA was not compiled in or the CPU lacks it.
const KernelTable* isa_table(Isa isa);

/// The table used by the library. Chosen once, on first call.
const KernelTable& active();

/// Overrides the active table (tests and benchmarks). Not thread-safe with
/// respect to concurrent kernel calls.
void set_active(Isa isa);

std::string_view active_name();

// Convenience wrappers over the active table.

inline cplx cdotw(std::span<const cplx> a, std::span<const cplx> b,
                  std::span<const double> w) {
  return active().cdotw(a.data(), b.data(), w.data(), a.size());
}

inline double cnorm2w(std::span<const cplx> a, std::span<const double> w) {
  return active().cnorm2w(a.data(), w.data(), a.size());
}

inline void caxpy(std::span<cplx> y, cplx alpha, std::span<const cplx> x) {
  active().caxpy(y.data(), alpha, x.data(), y.size());
}

inline void cabs2(std::span<const cplx> a, std::span<double> out) {
  active().cabs2(a.data(), out.data(), a.size());
}

inline double ddot(std::span<const double> a, std::span<const double> b) {
  return active().ddot(a.data(), b.data(), a.size());
}

inline void daxpy(std::span<double> y, double alpha, std::span<const double> x) {
  active().daxpy(y.data(), alpha, x.data(), y.size());
}

}  // namespace drbss::kernels

#endif  // DRBSS_KERNELS_HPP_
