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

#include "drbss/separation.hpp"

#include <cmath>

#include "drbss/kernels.hpp"

namespace drbss {

RowSet observation_rows(const StackedObservation& sx, std::size_t f) {
  RowSet rows(sx.n_rows());
  for (std::size_t n = 0; n < rows.size(); ++n) rows[n] = sx.row(f, n);
  return rows;
}

RowSet observation_rows(const Spectrogram& x, std::size_t f) {
  RowSet rows(x.n_chan());
  for (std::size_t m = 0; m < rows.size(); ++m) rows[m] = x.series(f, m);
  return rows;
}

Eigen::MatrixXcd weighted_cov(const RowSet& rows, std::span<const double> inv_r) {
  if (rows.empty()) return {};
  const double n_frames = static_cast<double>(rows.front().size());
  return weighted_gram(rows, inv_r) / n_frames;
}

Eigen::RowVectorXcd ip_update_row(Eigen::MatrixXcd& v, std::size_t n_src,
                                  const Eigen::MatrixXcd& g, std::size_t n,
                                  SolveCounter& counter, long freq) {
  const auto ns = static_cast<Eigen::Index>(n_src);
  const auto d = v.rows();
  const Eigen::VectorXcd e_n = Eigen::VectorXcd::Unit(ns, static_cast<Eigen::Index>(n));
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(d);
  a.head(ns) = solve_general(v.topLeftCorner(ns, ns), e_n, counter, freq);
  Eigen::VectorXcd p = solve_hermitian_loaded(g, a, counter, freq);
  const double denom = a.dot(p).real();  // a^H G^{-1} a
  if (!(denom > 0.0) || !std::isfinite(denom))
    throw NumericalError("ip: non-positive normalization", freq);
  p /= std::sqrt(denom);
  v.row(static_cast<Eigen::Index>(n)) = p.adjoint();
  return v.row(static_cast<Eigen::Index>(n));
}

Eigen::VectorXcd iss_update_source(Eigen::MatrixXcd& v, std::size_t n_src,
                                   const OutputRows& outputs, const WeightRows& inv_r,
                                   std::size_t n) {
  const auto yn = std::span<const cplx>(outputs[n]);
  const double n_frames = static_cast<double>(yn.size());
  Eigen::VectorXcd coef = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n_src));

  for (std::size_t m = 0; m < n_src; ++m) {
    const double den = kernels::cnorm2w(yn, inv_r[m]);
    if (m == n) {
      if (den / n_frames > kDenominatorGuard)
        coef(static_cast<Eigen::Index>(m)) = 1.0 - 1.0 / std::sqrt(den / n_frames);
    } else if (den > kDenominatorGuard) {
      coef(static_cast<Eigen::Index>(m)) = kernels::cdotw(outputs[m], yn, inv_r[m]) / den;
    }
  }

  const Eigen::RowVectorXcd row_n = v.row(static_cast<Eigen::Index>(n));
  for (std::size_t m = 0; m < n_src; ++m) {
    if (m == n) continue;
    const cplx c = coef(static_cast<Eigen::Index>(m));
    v.row(static_cast<Eigen::Index>(m)) -= c * row_n;
    kernels::caxpy(outputs[m], -c, yn);
  }
  const double scale = 1.0 - coef(static_cast<Eigen::Index>(n)).real();
  v.row(static_cast<Eigen::Index>(n)) *= scale;
  for (cplx& y : outputs[n]) y *= scale;
  return coef;
}

}  // namespace drbss
