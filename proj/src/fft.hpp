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

// Thin RAII wrapper over FFTW real transforms. Internal to the library.

#ifndef DRBSS_SRC_FFT_HPP_
#define DRBSS_SRC_FFT_HPP_

#include <cstddef>

#include "drbss/common.hpp"

namespace drbss::detail {

/// Length-n real FFT pair. forward() maps n reals to n/2+1 bins, inverse()
/// maps n/2+1 bins back to n reals without the 1/n factor. An instance owns
/// scratch buffers, so it must not be shared between threads.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }
  void forward(const double* in, cplx* out);
  void inverse(const cplx* in, double* out);

 private:
  std::size_t n_;
  double* real_buf_;
  void* cplx_buf_;
  void* fwd_;
  void* inv_;
};

}  // namespace drbss::detail

#endif  // DRBSS_SRC_FFT_HPP_
