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

#include "drbss/linalg.hpp"

#include <string>

#include "drbss/kernels.hpp"

namespace drbss {

Eigen::MatrixXcd weighted_gram(const RowSet& rows, std::span<const double> w) {
  const auto d = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXcd g(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    g(i, i) = cplx(kernels::cnorm2w(rows[static_cast<std::size_t>(i)], w), 0.0);
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const cplx v = kernels::cdotw(rows[static_cast<std::size_t>(i)],
                                    rows[static_cast<std::size_t>(j)], w);
      g(i, j) = v;
      g(j, i) = std::conj(v);
    }
  }
  return g;
}

Eigen::VectorXcd weighted_cross(const RowSet& rows, std::span<const cplx> y,
                                std::span<const double> w) {
  Eigen::VectorXcd c(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    c(static_cast<Eigen::Index>(i)) = kernels::cdotw(rows[i], y, w);
  return c;
}

namespace {
std::string at_freq(long freq) {
  return freq >= 0 ? " at frequency " + std::to_string(freq) : std::string();
}
}  // namespace

Eigen::MatrixXcd solve_hermitian_loaded(const Eigen::MatrixXcd& r, const Eigen::MatrixXcd& b,
                                        SolveCounter& counter, long freq) {
  counter.add();
  const auto d = r.rows();
  const double trace = r.diagonal().real().sum();
  if (!(trace > 0.0))
    throw NumericalError("hermitian solve failed (zero matrix)" + at_freq(freq), freq);
  const double scale = trace / static_cast<double>(d);

  // The exact factor is kept whenever its pivots are usable: loading moves
  // the solution off the minimizer and can make an update raise the cost.
  Eigen::LLT<Eigen::MatrixXcd> llt(r);
  if (llt.info() != Eigen::Success ||
      llt.matrixLLT().diagonal().real().cwiseAbs2().minCoeff() < kPivotFloor * scale) {
    Eigen::MatrixXcd loaded = r;
    loaded.diagonal().array() += kDiagonalLoading * scale;
    llt.compute(loaded);
    if (llt.info() != Eigen::Success)
      throw NumericalError("hermitian solve failed (matrix not positive definite)" +
                               at_freq(freq),
                           freq);
  }
  Eigen::MatrixXcd x = llt.solve(b);
  if (!x.allFinite())
    throw NumericalError("hermitian solve produced non-finite values" + at_freq(freq), freq);
  return x;
}

Eigen::MatrixXcd solve_general(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                               SolveCounter& counter, long freq) {
  counter.add();
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(a);
  if (!lu.isInvertible())
    throw NumericalError("singular matrix" + at_freq(freq), freq);
  Eigen::MatrixXcd x = lu.solve(b);
  if (!x.allFinite()) throw NumericalError("solve produced non-finite values" + at_freq(freq), freq);
  return x;
}

}  // namespace drbss
