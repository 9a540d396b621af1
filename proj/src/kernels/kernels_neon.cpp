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

// NEON variants for aarch64. One float64x2_t holds one complex sample.

#include <arm_neon.h>

#include "kernels_impl.hpp"

namespace drbss::kernels::detail {
namespace {

inline const double* as_doubles(const cplx* p) {
  return reinterpret_cast<const double*>(p);
}
inline double* as_doubles(cplx* p) { return reinterpret_cast<double*>(p); }

cplx cdotw(const cplx* a, const cplx* b, const double* w, std::size_t n) {
  const double* pa = as_doubles(a);
  const double* pb = as_doubles(b);
  float64x2_t re_acc = vdupq_n_f64(0.0);  // (ar*br, ai*bi)
  float64x2_t im_acc = vdupq_n_f64(0.0);  // (ar*bi, ai*br)
  for (std::size_t t = 0; t < n; ++t) {
    const float64x2_t va = vld1q_f64(pa + 2 * t);
    const float64x2_t vb = vld1q_f64(pb + 2 * t);
    const float64x2_t vw = vdupq_n_f64(w[t]);
    re_acc = vfmaq_f64(re_acc, vmulq_f64(va, vb), vw);
    im_acc = vfmaq_f64(im_acc, vmulq_f64(va, vextq_f64(vb, vb, 1)), vw);
  }
  const double re = vgetq_lane_f64(re_acc, 0) + vgetq_lane_f64(re_acc, 1);
  const double im = vgetq_lane_f64(im_acc, 1) - vgetq_lane_f64(im_acc, 0);
  return {re, im};
}

double cnorm2w(const cplx* a, const double* w, std::size_t n) {
  const double* pa = as_doubles(a);
  float64x2_t acc = vdupq_n_f64(0.0);
  for (std::size_t t = 0; t < n; ++t) {
    const float64x2_t va = vld1q_f64(pa + 2 * t);
    acc = vfmaq_f64(acc, vmulq_f64(va, va), vdupq_n_f64(w[t]));
  }
  return vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
}

void caxpy(cplx* y, cplx alpha, const cplx* x, std::size_t n) {
  const double* px = as_doubles(x);
  double* py = as_doubles(y);
  const float64x2_t var = vdupq_n_f64(alpha.real());
  const double ai_signed[2] = {-alpha.imag(), alpha.imag()};
  const float64x2_t vai = vld1q_f64(ai_signed);
  for (std::size_t t = 0; t < n; ++t) {
    const float64x2_t vx = vld1q_f64(px + 2 * t);
    float64x2_t vy = vld1q_f64(py + 2 * t);
    vy = vfmaq_f64(vy, var, vx);
    vy = vfmaq_f64(vy, vai, vextq_f64(vx, vx, 1));
    vst1q_f64(py + 2 * t, vy);
  }
}

void cabs2(const cplx* a, double* out, std::size_t n) {
  const double* pa = as_doubles(a);
  for (std::size_t t = 0; t < n; ++t) {
    const float64x2_t va = vld1q_f64(pa + 2 * t);
    out[t] = vaddvq_f64(vmulq_f64(va, va));
  }
}

double ddot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t t = 0;
  for (; t + 2 <= n; t += 2) acc = vfmaq_f64(acc, vld1q_f64(a + t), vld1q_f64(b + t));
  double s = vaddvq_f64(acc);
  for (; t < n; ++t) s += a[t] * b[t];
  return s;
}

void daxpy(double* y, double alpha, const double* x, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t t = 0;
  for (; t + 2 <= n; t += 2) vst1q_f64(y + t, vfmaq_f64(vld1q_f64(y + t), va, vld1q_f64(x + t)));
  for (; t < n; ++t) y[t] += alpha * x[t];
}

}  // namespace

const KernelTable kNeonTable = {"neon", cdotw, cnorm2w, caxpy, cabs2, ddot, daxpy};

}  // namespace drbss::kernels::detail
