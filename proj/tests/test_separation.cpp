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

#include <cmath>
#include <random>

#include "doctest.h"
#include "drbss/ilrma_t.hpp"
#include "drbss/kernels.hpp"
#include "drbss/separation.hpp"
#include "helpers.hpp"

using namespace drbss;

namespace {

std::vector<double> reciprocal(std::span<const double> r) {
  std::vector<double> w(r.size());
  for (std::size_t t = 0; t < r.size(); ++t) w[t] = 1.0 / r[t];
  return w;
}

// Separation state with random variances frozen in place of the NMF model.
SeparationState frozen_state(std::size_t n, std::size_t f, std::size_t t, TapConfig taps,
                             std::uint64_t seed) {
  SeparationState s(test::random_spectrogram(f, t, n, seed), taps, 2, seed);
  s.variance = test::random_positive(n, f, t, seed + 1000);
  s.refresh_weights();
  return s;
}

double max_output_drift(const SeparationState& s) {
  const Spectrogram fresh = demix(s.demixer, s.observation);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < fresh.raw().size(); ++i) {
    worst = std::max(worst, std::abs(fresh.raw()[i] - s.outputs.raw()[i]));
    scale = std::max(scale, std::abs(fresh.raw()[i]));
  }
  return worst / scale;
}

}  // namespace

TEST_CASE("weighted covariance of a constant unit vector") {
  const std::size_t T = 10;
  std::vector<cplx> one(T, 1.0), zero(T, 0.0);
  const RowSet rows{one, zero};
  const std::vector<double> w(T, 1.0), w2(T, 0.5);
  const Eigen::MatrixXcd g = weighted_cov(rows, w);
  Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(2, 2);
  expect(0, 0) = 1.0;
  CHECK((g - expect).norm() <= 1e-15);
  CHECK((weighted_cov(rows, w2) - 0.5 * g).norm() <= 1e-15);
}

TEST_CASE("weighted covariance matches a naive loop") {
  const Spectrogram x = test::random_spectrogram(2, 30, 3, 1);
  const TapConfig taps{2, 1};
  const StackedObservation sx(x, taps);
  const SourceTensor r = test::random_positive(1, 2, 30, 2);
  for (std::size_t f = 0; f < 2; ++f) {
    const auto w = reciprocal(r.series(0, f));
    const Eigen::MatrixXcd g = weighted_cov(observation_rows(sx, f), w);
    Eigen::MatrixXcd naive = Eigen::MatrixXcd::Zero(9, 9);
    for (std::size_t t = 0; t < 30; ++t) {
      const Eigen::VectorXcd v = sx.vector(f, t);
      naive += v * v.adjoint() / r.at(0, f, t);
    }
    naive /= 30.0;
    CHECK((g - naive).cwiseAbs().maxCoeff() <= 1e-13 * naive.cwiseAbs().maxCoeff());
    CHECK((g - g.adjoint()).norm() == 0.0);
  }
}

TEST_CASE("hermitian solve is exact on well-conditioned matrices") {
  const Eigen::MatrixXcd a = test::random_matrix(4, 10, 1);
  const Eigen::MatrixXcd r = a * a.adjoint();
  const Eigen::MatrixXcd b = test::random_matrix(4, 2, 2);
  SolveCounter counter;
  const Eigen::MatrixXcd x = solve_hermitian_loaded(r, b, counter);
  CHECK((r * x - b).norm() <= 1e-12 * b.norm());
  CHECK(counter.count == 1);
}

TEST_CASE("hermitian solve falls back to loading on singular matrices") {
  // Rank 2 in dimension 4: the plain factor breaks down, the loaded one
  // returns a finite least-norm-like solution inside the range.
  const Eigen::MatrixXcd a = test::random_matrix(4, 2, 3);
  const Eigen::MatrixXcd r = a * a.adjoint();
  const Eigen::VectorXcd b = r * test::random_matrix(4, 1, 4);
  SolveCounter counter;
  const Eigen::MatrixXcd x = solve_hermitian_loaded(r, b, counter, 7);
  CHECK(x.allFinite());
  CHECK((r * x - b).norm() <= 1e-6 * b.norm());
  CHECK(counter.count == 1);

  CHECK_THROWS_AS(solve_hermitian_loaded(Eigen::MatrixXcd::Zero(3, 3), b.head(3), counter, 2),
                  NumericalError);
  Eigen::MatrixXcd indefinite = Eigen::MatrixXcd::Identity(2, 2);
  indefinite(1, 1) = -0.5;
  CHECK_THROWS_AS(solve_hermitian_loaded(indefinite, Eigen::VectorXcd::Ones(2), counter),
                  NumericalError);
}

TEST_CASE("IP with one source normalizes the scalar filter") {
  const Spectrogram x = test::random_spectrogram(1, 40, 1, 3);
  const std::vector<double> w(40, 0.7);
  const Eigen::MatrixXcd g = weighted_cov(observation_rows(x, 0), w);
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(1, 1);
  SolveCounter counter;
  ip_update_row(v, 1, g, 0, counter);
  CHECK(counter.count == 2);
  CHECK(std::abs(v(0, 0) - cplx(1.0 / std::sqrt(g(0, 0).real()))) <= 1e-14);
  CHECK(std::norm(v(0, 0)) * g(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("IP row satisfies the forced normalization") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const std::size_t n_src = 3;
    Eigen::MatrixXcd v = test::random_matrix(3, 3, seed) + 2.0 * Eigen::MatrixXcd::Identity(3, 3);
    SolveCounter counter;
    for (std::size_t n = 0; n < n_src; ++n) {
      const Eigen::MatrixXcd a = test::random_matrix(3, 12, 50 + seed * 3 + n);
      const Eigen::MatrixXcd g = a * a.adjoint() / 12.0;
      ip_update_row(v, n_src, g, n, counter);
      const Eigen::VectorXcd p = v.row(static_cast<Eigen::Index>(n)).adjoint();
      CHECK((p.adjoint() * g * p)(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(counter.count == 2 * n_src);
  }
}

TEST_CASE("IP row is a local minimizer: perturbations within 1e-3 do not lower the cost") {
  // With the variances frozen the cost is
  //   J(W) = -2 log|det W| + sum_n w_n G_n w_n^H.
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Eigen::MatrixXcd> gs;
  for (std::size_t n = 0; n < 2; ++n) {
    const Eigen::MatrixXcd a = test::random_matrix(2, 20, 70 + n);
    gs.push_back(a * a.adjoint() / 20.0);
  }
  const auto cost = [&](const Eigen::MatrixXcd& w) {
    double j = -2.0 * std::log(std::abs(w.determinant()));
    for (Eigen::Index n = 0; n < 2; ++n)
      j += (w.row(n) * gs[static_cast<std::size_t>(n)] * w.row(n).adjoint())(0, 0).real();
    return j;
  };
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Identity(2, 2);
  SolveCounter counter;
  for (std::size_t n = 0; n < 2; ++n) {
    ip_update_row(w, 2, gs[n], n, counter);
    const double j0 = cost(w);
    for (int trial = 0; trial < 200; ++trial) {
      Eigen::MatrixXcd pert = w;
      Eigen::RowVectorXcd d(2);
      d << cplx(g(rng), g(rng)), cplx(g(rng), g(rng));
      pert.row(static_cast<Eigen::Index>(n)) += 1e-3 * d / d.norm();
      CHECK(cost(pert) >= j0 - 1e-12);
    }
  }
}

TEST_CASE("ISS coefficients: signal form equals covariance form") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SeparationState s = frozen_state(2, 2, 8, TapConfig{0, 1}, seed);
    for (std::size_t f = 0; f < 2; ++f) {
      auto& v = s.demixer.matrix(f);
      v = test::random_matrix(2, 2, seed + 500) + 2.0 * Eigen::MatrixXcd::Identity(2, 2);
      s.recompute_outputs();
      const RowSet rows = observation_rows(s.observation, f);
      for (std::size_t n = 0; n < 2; ++n) {
        const Eigen::MatrixXcd before = v;
        Eigen::VectorXcd expect(2);
        for (std::size_t m = 0; m < 2; ++m) {
          const Eigen::MatrixXcd gm = weighted_cov(rows, s.inv_variance.series(m, f));
          const auto pm = before.row(static_cast<Eigen::Index>(m));
          const auto pn = before.row(static_cast<Eigen::Index>(n));
          const cplx num = (pm * gm * pn.adjoint())(0, 0);
          const double den = (pn * gm * pn.adjoint())(0, 0).real();
          expect(static_cast<Eigen::Index>(m)) = m == n ? cplx(1.0 - 1.0 / std::sqrt(den)) : num / den;
        }
        const Eigen::VectorXcd got = iss_update_source(v, 2, s.output_rows(f), s.weight_rows(f), n);
        CHECK((got - expect).cwiseAbs().maxCoeff() <= 1e-10);
      }
    }
  }
}

TEST_CASE("ISS self-update normalizes the output power") {
  SeparationState s = frozen_state(3, 3, 50, TapConfig{0, 1}, 4);
  for (std::size_t f = 0; f < 3; ++f)
    for (std::size_t n = 0; n < 3; ++n) {
      iss_update_source(s.demixer.matrix(f), 3, s.output_rows(f), s.weight_rows(f), n);
      const double p = kernels::cnorm2w(s.outputs.series(f, n), s.inv_variance.series(n, f)) / 50.0;
      CHECK(p == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("ISS with a silent source is a no-op") {
  SeparationState s = frozen_state(2, 1, 20, TapConfig{0, 1}, 5);
  for (cplx& v : s.outputs.series(0, 1)) v = 0.0;
  s.demixer.matrix(0).row(1).setZero();
  const Eigen::MatrixXcd before = s.demixer.matrix(0);
  const auto y0 = std::vector<cplx>(s.outputs.series(0, 0).begin(), s.outputs.series(0, 0).end());
  const Eigen::VectorXcd c = iss_update_source(s.demixer.matrix(0), 2, s.output_rows(0), s.weight_rows(0), 1);
  CHECK(c.isZero(0.0));
  CHECK(s.demixer.matrix(0) == before);
  CHECK(std::equal(y0.begin(), y0.end(), s.outputs.series(0, 0).begin()));
}

TEST_CASE("filter sweeps never raise the cost with variances frozen") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SeparationState ip = frozen_state(3, 4, 60, TapConfig{0, 1}, 10 + seed);
    SeparationState iss = frozen_state(3, 4, 60, TapConfig{0, 1}, 10 + seed);
    double c_ip = cost(ip.demixer, ip.outputs, ip.variance);
    double c_iss = c_ip;
    for (int sweep = 0; sweep < 10; ++sweep) {
      ip_pass(ip);
      iss_pass(iss);
      const double n_ip = cost(ip.demixer, ip.outputs, ip.variance);
      const double n_iss = cost(iss.demixer, iss.outputs, iss.variance);
      CHECK(n_ip <= c_ip + 1e-8 * std::abs(c_ip));
      CHECK(n_iss <= c_iss + 1e-8 * std::abs(c_iss));
      c_ip = n_ip;
      c_iss = n_iss;
    }
    CHECK(ip.total_solves() == 10 * 3 * 2 * 4);
    CHECK(iss.total_solves() == 0);
    CHECK(max_output_drift(ip) <= 1e-10);
    CHECK(max_output_drift(iss) <= 1e-10);
  }
}
