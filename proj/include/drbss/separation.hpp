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

#ifndef DRBSS_SEPARATION_HPP_
#define DRBSS_SEPARATION_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "drbss/linalg.hpp"
#include "drbss/model.hpp"
#include "drbss/stft.hpp"

namespace drbss {

using OutputRows = std::vector<std::span<cplx>>;
using WeightRows = std::vector<std::span<const double>>;

/// All stacked rows at frequency f (dimension N(L+1)).
RowSet observation_rows(const StackedObservation& sx, std::size_t f);
/// The channels of x at frequency f (dimension M).
RowSet observation_rows(const Spectrogram& x, std::size_t f);

/// G = (1/T) sum_t v_t v_t^H / r_t, given the reciprocal variances 1/r.
Eigen::MatrixXcd weighted_cov(const RowSet& rows, std::span<const double> inv_r);

/// Iterative projection update of row n of the demixing matrix `v`, whose
/// top-left n_src x n_src block is W. With a = [W^{-1} e_n; 0]:
///   p = G^{-1} a / sqrt(a^H G^{-1} a),  row n <- p^H.
/// Two solves are charged to `counter`. Returns the new row.
Eigen::RowVectorXcd ip_update_row(Eigen::MatrixXcd& v, std::size_t n_src,
                                  const Eigen::MatrixXcd& g, std::size_t n,
                                  SolveCounter& counter, long freq = -1);

/// Iterative source steering for source n, in signal form. `outputs[m]`
/// must hold y_m = row m of `v` applied to the observation, and `inv_r[m]`
/// the reciprocal variances of source m. Subtracts v p_n^H from the top
/// rows of `v`, updates the outputs incrementally and returns the
/// coefficient vector (length n_src). No solves.
Eigen::VectorXcd iss_update_source(Eigen::MatrixXcd& v, std::size_t n_src,
                                   const OutputRows& outputs, const WeightRows& inv_r,
                                   std::size_t n);

}  // namespace drbss

#endif  // DRBSS_SEPARATION_HPP_
