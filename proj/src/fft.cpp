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

#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

namespace drbss::detail {
namespace {
std::mutex g_plan_mutex;  // FFTW planning is not thread-safe
}

RealFft::RealFft(std::size_t n) : n_(n) {
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  real_buf_ = fftw_alloc_real(n);
  auto* c = fftw_alloc_complex(n / 2 + 1);
  cplx_buf_ = c;
  fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real_buf_, c, FFTW_ESTIMATE);
  inv_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), c, real_buf_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(inv_));
  fftw_free(real_buf_);
  fftw_free(cplx_buf_);
}

void RealFft::forward(const double* in, cplx* out) {
  std::copy(in, in + n_, real_buf_);
  fftw_execute(static_cast<fftw_plan>(fwd_));
  const auto* c = static_cast<const fftw_complex*>(cplx_buf_);
  for (std::size_t k = 0; k < n_ / 2 + 1; ++k) out[k] = cplx(c[k][0], c[k][1]);
}

void RealFft::inverse(const cplx* in, double* out) {
  auto* c = static_cast<fftw_complex*>(cplx_buf_);
  for (std::size_t k = 0; k < n_ / 2 + 1; ++k) {
    c[k][0] = in[k].real();
    c[k][1] = in[k].imag();
  }
  fftw_execute(static_cast<fftw_plan>(inv_));
  std::copy(real_buf_, real_buf_ + n_, out);
}

}  // namespace drbss::detail
