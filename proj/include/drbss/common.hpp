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

#ifndef DRBSS_COMMON_HPP_
#define DRBSS_COMMON_HPP_

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace drbss {

using cplx = std::complex<double>;

/// Floor applied to every source / WPE variance.
inline constexpr double kVarianceFloor = 1e-10;

/// Relative diagonal loading for Hermitian solves whose plain Cholesky
/// factor has a squared pivot below kPivotFloor * tr / dim.
inline constexpr double kDiagonalLoading = 1e-10;
inline constexpr double kPivotFloor = 1e-14;

/// ISS / SEQ denominators at or below this value skip the update.
inline constexpr double kDenominatorGuard = 1e-30;

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or malformed input (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Singular matrix, failed solve or non-finite value (CLI exit code 3).
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, long freq = -1, long iteration = -1)
      : Error(what), freq_(freq), iteration_(iteration) {}
  long freq() const { return freq_; }
  long iteration() const { return iteration_; }

 private:
  long freq_;
  long iteration_;
};

/// File system or format failures (CLI exit code 4).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace drbss

#endif  // DRBSS_COMMON_HPP_
