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

#ifndef DRBSS_LINALG_HPP_
#define DRBSS_LINALG_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "drbss/common.hpp"

namespace drbss {

/// Counts linear solves against a matrix (one factorization = one solve,
/// regardless of the number of right-hand sides).
struct SolveCounter {
  std::uint64_t count = 0;
  void add(std::uint64_t n = 1) { count += n; }
};

using RowSet = std::vector<std::span<const cplx>>;

/// sum_t w[t] v_t v_t^H where v_t[i] = rows[i][t]. Hermitian by construction.
Eigen::MatrixXcd weighted_gram(const RowSet& rows, std::span<const double> w);

/// sum_t w[t] v_t conj(y[t]) for the same stacking as weighted_gram.
Eigen::VectorXcd weighted_cross(const RowSet& rows, std::span<const cplx> y,
                                std::span<const double> w);

/// Solves R X = B for Hermitian positive semidefinite R. When R is
/// numerically singular, (R + delta I) is used instead, with
/// delta = kDiagonalLoading * tr(R) / dim. Throws NumericalError (with
/// `freq`) when the loaded matrix is still not positive definite.
Eigen::MatrixXcd solve_hermitian_loaded(const Eigen::MatrixXcd& r, const Eigen::MatrixXcd& b,
                                        SolveCounter& counter, long freq = -1);

/// Solves A X = B for square A; throws NumericalError when A is singular.
Eigen::MatrixXcd solve_general(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                               SolveCounter& counter, long freq = -1);

}  // namespace drbss

#endif  // DRBSS_LINALG_HPP_
