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

// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma;
// it is only entered after the dispatcher has checked the CPU.

#include <immintrin.h>

#include "kernels_impl.hpp"

namespace drbss::kernels::detail {
namespace {

inline const double* as_doubles(const cplx* p) {
  return reinterpret_cast<const double*>(p);
}
inline double* as_doubles(cplx* p) { return reinterpret_cast<double*>(p); }

// [w0, w0, w1, w1]
inline __m256d widen_pair(const double* w) {
  return _mm256_set_m128d(_mm_set1_pd(w[1]), _mm_set1_pd(w[0]));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

cplx cdotw(const cplx* a, const cplx* b, const double* w, std::size_t n) {
  const double* pa = as_doubles(a);
  const double* pb = as_doubles(b);
  __m256d re0 = _mm256_setzero_pd(), im0 = _mm256_setzero_pd();
  __m256d re1 = _mm256_setzero_pd(), im1 = _mm256_setzero_pd();
  std::size_t t = 0;
  for (; t + 4 <= n; t += 4) {
    const __m256d va0 = _mm256_loadu_pd(pa + 2 * t);
    const __m256d vb0 = _mm256_loadu_pd(pb + 2 * t);
    const __m256d va1 = _mm256_loadu_pd(pa + 2 * t + 4);
    const __m256d vb1 = _mm256_loadu_pd(pb + 2 * t + 4);
    const __m256d w0 = widen_pair(w + t);
    const __m256d w1 = widen_pair(w + t + 2);
    // lanes (ar*br, ai*bi) and (ar*bi, ai*br)
    re0 = _mm256_fmadd_pd(_mm256_mul_pd(va0, vb0), w0, re0);
    im0 = _mm256_fmadd_pd(_mm256_mul_pd(va0, _mm256_permute_pd(vb0, 0x5)), w0, im0);
    re1 = _mm256_fmadd_pd(_mm256_mul_pd(va1, vb1), w1, re1);
    im1 = _mm256_fmadd_pd(_mm256_mul_pd(va1, _mm256_permute_pd(vb1, 0x5)), w1, im1);
  }
  const __m256d re_acc = _mm256_add_pd(re0, re1);
  const __m256d im_acc = _mm256_add_pd(im0, im1);
  alignas(32) double imv[4];
  _mm256_store_pd(imv, im_acc);
  double re = hsum(re_acc);
  double im = (imv[1] + imv[3]) - (imv[0] + imv[2]);
  for (; t < n; ++t) {
    const double ar = a[t].real(), ai = a[t].imag();
    const double br = b[t].real(), bi = b[t].imag();
    re += w[t] * (ar * br + ai * bi);
    im += w[t] * (ai * br - ar * bi);
  }
  return {re, im};
}

double cnorm2w(const cplx* a, const double* w, std::size_t n) {
  const double* pa = as_doubles(a);
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t t = 0;
  for (; t + 4 <= n; t += 4) {
    const __m256d va0 = _mm256_loadu_pd(pa + 2 * t);
    const __m256d va1 = _mm256_loadu_pd(pa + 2 * t + 4);
    acc0 = _mm256_fmadd_pd(_mm256_mul_pd(va0, va0), widen_pair(w + t), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_mul_pd(va1, va1), widen_pair(w + t + 2), acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; t < n; ++t)
    acc += w[t] * (a[t].real() * a[t].real() + a[t].imag() * a[t].imag());
  return acc;
}

void caxpy(cplx* y, cplx alpha, const cplx* x, std::size_t n) {
  const double ar = alpha.real(), ai = alpha.imag();
  const double* px = as_doubles(x);
  double* py = as_doubles(y);
  const __m256d var = _mm256_set1_pd(ar);
  const __m256d vai = _mm256_set_pd(ai, -ai, ai, -ai);
  std::size_t t = 0;
  for (; t + 2 <= n; t += 2) {
    const __m256d vx = _mm256_loadu_pd(px + 2 * t);
    __m256d vy = _mm256_loadu_pd(py + 2 * t);
    vy = _mm256_fmadd_pd(var, vx, vy);
    vy = _mm256_fmadd_pd(vai, _mm256_permute_pd(vx, 0x5), vy);
    _mm256_storeu_pd(py + 2 * t, vy);
  }
  for (; t < n; ++t) {
    const double xr = x[t].real(), xi = x[t].imag();
    y[t] = cplx(y[t].real() + ar * xr - ai * xi, y[t].imag() + ar * xi + ai * xr);
  }
}

void cabs2(const cplx* a, double* out, std::size_t n) {
  const double* pa = as_doubles(a);
  std::size_t t = 0;
  for (; t + 4 <= n; t += 4) {
    const __m256d v0 = _mm256_loadu_pd(pa + 2 * t);
    const __m256d v1 = _mm256_loadu_pd(pa + 2 * t + 4);
    // [|a0|^2, |a2|^2, |a1|^2, |a3|^2] -> natural order
    const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(v0, v0), _mm256_mul_pd(v1, v1));
    _mm256_storeu_pd(out + t, _mm256_permute4x64_pd(h, _MM_SHUFFLE(3, 1, 2, 0)));
  }
  for (; t < n; ++t)
    out[t] = a[t].real() * a[t].real() + a[t].imag() * a[t].imag();
}

double ddot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t t = 0;
  for (; t + 8 <= n; t += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + t), _mm256_loadu_pd(b + t), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + t + 4), _mm256_loadu_pd(b + t + 4), acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; t < n; ++t) acc += a[t] * b[t];
  return acc;
}

void daxpy(double* y, double alpha, const double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t t = 0;
  for (; t + 4 <= n; t += 4)
    _mm256_storeu_pd(y + t, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + t), _mm256_loadu_pd(y + t)));
  for (; t < n; ++t) y[t] += alpha * x[t];
}

}  // namespace

const KernelTable kAvx2Table = {"avx2", cdotw, cnorm2w, caxpy, cabs2, ddot, daxpy};

}  // namespace drbss::kernels::detail
