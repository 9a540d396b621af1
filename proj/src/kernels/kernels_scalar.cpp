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

#include "kernels_impl.hpp"

namespace drbss::kernels::detail {
namespace {

cplx cdotw(const cplx* a, const cplx* b, const double* w, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double ar = a[t].real(), ai = a[t].imag();
    const double br = b[t].real(), bi = b[t].imag();
    re += w[t] * (ar * br + ai * bi);
    im += w[t] * (ai * br - ar * bi);
  }
  return {re, im};
}

double cnorm2w(const cplx* a, const double* w, std::size_t n) {
  double acc = 0.0;
  for (std::size_t t = 0; t < n; ++t)
    acc += w[t] * (a[t].real() * a[t].real() + a[t].imag() * a[t].imag());
  return acc;
}

void caxpy(cplx* y, cplx alpha, const cplx* x, std::size_t n) {
  const double ar = alpha.real(), ai = alpha.imag();
  for (std::size_t t = 0; t < n; ++t) {
    const double xr = x[t].real(), xi = x[t].imag();
    y[t] = cplx(y[t].real() + ar * xr - ai * xi, y[t].imag() + ar * xi + ai * xr);
  }
}

void cabs2(const cplx* a, double* out, std::size_t n) {
  for (std::size_t t = 0; t < n; ++t)
    out[t] = a[t].real() * a[t].real() + a[t].imag() * a[t].imag();
}

double ddot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t t = 0; t < n; ++t) acc += a[t] * b[t];
  return acc;
}

void daxpy(double* y, double alpha, const double* x, std::size_t n) {
  for (std::size_t t = 0; t < n; ++t) y[t] += alpha * x[t];
}

}  // namespace

const KernelTable kScalarTable = {"scalar", cdotw, cnorm2w, caxpy, cabs2, ddot, daxpy};

}  // namespace drbss::kernels::detail
