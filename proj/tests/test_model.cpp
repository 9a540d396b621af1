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

#include "doctest.h"
#include "drbss/model.hpp"
#include "helpers.hpp"

using namespace drbss;

TEST_CASE("stacked observation without taps is the observation") {
  const Spectrogram x = test::random_spectrogram(3, 6, 2, 1);
  const StackedObservation sx(x, TapConfig{0, 2});
  REQUIRE(sx.n_rows() == 2);
  CHECK(sx.n_past_rows() == 0);
  for (std::size_t f = 0; f < 3; ++f)
    for (std::size_t t = 0; t < 6; ++t)
      for (std::size_t m = 0; m < 2; ++m) CHECK(sx.at(f, t, m) == x.at(f, t, m));
}

TEST_CASE("out-of-range history reads as zero") {
  const Spectrogram x = test::random_spectrogram(2, 5, 1, 2);
  const StackedObservation sx(x, TapConfig{1, 2});
  const Eigen::VectorXcd v = sx.vector(0, 0);
  REQUIRE(v.size() == 2);
  CHECK(v(0) == x.at(0, 0, 0));
  CHECK(v(1) == cplx(0.0));
}

TEST_CASE("stacked layout follows the delayed-concatenation index arithmetic") {
  // L = 2, delay 2, N = 2: at frame t the blocks are x_t, x_{t-2}, x_{t-3}.
  const std::size_t n = 2, taps = 2, delay = 2, T = 9;
  const Spectrogram x = test::random_spectrogram(2, T, n, 3);
  const StackedObservation sx(x, TapConfig{taps, delay});
  REQUIRE(sx.n_rows() == 6);
  for (std::size_t f = 0; f < 2; ++f)
    for (std::size_t t = 0; t < T; ++t) {
      const Eigen::VectorXcd v = sx.vector(f, t);
      for (std::size_t b = 0; b <= taps; ++b) {
        const long src = static_cast<long>(t) - (b == 0 ? 0 : static_cast<long>(delay + b - 1));
        for (std::size_t m = 0; m < n; ++m) {
          const cplx expect = src >= 0 ? x.at(f, static_cast<std::size_t>(src), m) : cplx(0.0);
          CHECK(v(static_cast<Eigen::Index>(b * n + m)) == expect);
        }
      }
    }
  // The worked case: 1-based t = 5 stacks frames 5, 3, 2.
  const Eigen::VectorXcd v = sx.vector(1, 4);
  CHECK(v(0) == x.at(1, 4, 0));
  CHECK(v(3) == x.at(1, 2, 1));
  CHECK(v(4) == x.at(1, 1, 0));
}

TEST_CASE("identity filter passes the observation through") {
  const Spectrogram x = test::random_spectrogram(4, 7, 3, 4);
  const StackedObservation sx(x, TapConfig{2, 1});
  const ExtendedDemixer dm(4, 3, TapConfig{2, 1});
  const Spectrogram y = demix(dm, sx);
  CHECK(y.raw() == x.raw());
}

TEST_CASE("single-tap single-channel filter subtracts the delayed frame") {
  const Spectrogram x = test::random_spectrogram(2, 8, 1, 5);
  const TapConfig taps{1, 2};
  const StackedObservation sx(x, taps);
  ExtendedDemixer dm(2, 1, taps);
  const cplx z(0.4, -0.3);
  for (std::size_t f = 0; f < 2; ++f) dm.matrix(f)(0, 1) = -z;
  const Spectrogram y = demix(dm, sx);
  for (std::size_t f = 0; f < 2; ++f)
    for (std::size_t t = 0; t < 8; ++t) {
      const cplx past = t >= 2 ? x.at(f, t - 2, 0) : cplx(0.0);
      CHECK(std::abs(y.at(f, t, 0) - (x.at(f, t, 0) - z * past)) <= 1e-15);
    }
}

TEST_CASE("demix matches a naive per-bin matrix-vector product") {
  const TapConfig taps{1, 1};
  const Spectrogram x = test::random_spectrogram(3, 4, 2, 6);
  const StackedObservation sx(x, taps);
  ExtendedDemixer dm(3, 2, taps);
  for (std::size_t f = 0; f < 3; ++f)
    dm.matrix(f).topRows(2) = test::random_matrix(2, 4, 100 + f);
  const Spectrogram y = demix(dm, sx);
  for (std::size_t f = 0; f < 3; ++f)
    for (std::size_t t = 0; t < 4; ++t) {
      const Eigen::VectorXcd expect = dm.top(f) * sx.vector(f, t);
      for (std::size_t n = 0; n < 2; ++n)
        CHECK(std::abs(y.at(f, t, n) - expect(static_cast<Eigen::Index>(n))) <=
              1e-14 * (1.0 + std::abs(expect(static_cast<Eigen::Index>(n)))));
    }
}

TEST_CASE("demix is linear in the observation") {
  const TapConfig taps{2, 2};
  ExtendedDemixer dm(2, 2, taps);
  for (std::size_t f = 0; f < 2; ++f) dm.matrix(f).topRows(2) = test::random_matrix(2, 6, f);
  Spectrogram a = test::random_spectrogram(2, 10, 2, 7), b = test::random_spectrogram(2, 10, 2, 8);
  Spectrogram c = a;
  const cplx alpha(1.5, 0.5);
  for (std::size_t i = 0; i < c.raw().size(); ++i) c.raw()[i] = alpha * a.raw()[i] + b.raw()[i];
  const Spectrogram ya = demix(dm, StackedObservation(a, taps));
  const Spectrogram yb = demix(dm, StackedObservation(b, taps));
  const Spectrogram yc = demix(dm, StackedObservation(c, taps));
  for (std::size_t i = 0; i < yc.raw().size(); ++i)
    CHECK(std::abs(yc.raw()[i] - (alpha * ya.raw()[i] + yb.raw()[i])) <= 1e-12);
}

TEST_CASE("dimension mismatch is rejected") {
  const Spectrogram x = test::random_spectrogram(2, 4, 2, 9);
  const StackedObservation sx(x, TapConfig{1, 1});
  CHECK_THROWS_AS(demix(ExtendedDemixer(2, 2, TapConfig{2, 1}), sx), ConfigError);
  CHECK_THROWS_AS(demix(ExtendedDemixer(2, 3, TapConfig{1, 1}), sx), ConfigError);
  CHECK_THROWS_AS(TapConfig({1, 0}).validate(), ConfigError);
}

TEST_CASE("identity demixer decomposes into W = I and zero prediction") {
  const ExtendedDemixer dm(3, 2, TapConfig{2, 2});
  const WarevDecomposition d = extract_warev(dm);
  for (std::size_t f = 0; f < 3; ++f) {
    CHECK(d.separation[f].isIdentity(0.0));
    CHECK(d.prediction[f].isZero(0.0));
  }
}

TEST_CASE("separation/prediction round trip") {
  const TapConfig taps{3, 2};
  WarevDecomposition parts;
  for (std::size_t f = 0; f < 4; ++f) {
    parts.separation.push_back(test::random_matrix(2, 2, 20 + f) +
                               3.0 * Eigen::MatrixXcd::Identity(2, 2));
    parts.prediction.push_back(test::random_matrix(2, 6, 40 + f));
  }
  const ExtendedDemixer dm = compose_demixer(parts, taps);
  const WarevDecomposition back = extract_warev(dm);
  for (std::size_t f = 0; f < 4; ++f) {
    CHECK((back.separation[f] - parts.separation[f]).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((back.prediction[f] - parts.prediction[f]).cwiseAbs().maxCoeff() <= 1e-12);
    // P = W [I, -Zbar]
    Eigen::MatrixXcd p(2, 8);
    p << parts.separation[f], -parts.separation[f] * parts.prediction[f];
    CHECK((dm.top(f) - p).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(dm.lower_block_intact(f));
  }
}

TEST_CASE("singular separation block is reported with its frequency") {
  ExtendedDemixer dm(3, 2, TapConfig{1, 1});
  dm.matrix(2).row(1).setZero();
  try {
    extract_warev(dm);
    FAIL("expected a NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.freq() == 2);
  }
}

TEST_CASE("block-triangular determinant equals det W") {
  const TapConfig taps{2, 1};
  ExtendedDemixer dm(2, 2, taps);
  for (std::size_t f = 0; f < 2; ++f) dm.matrix(f).topRows(2) = test::random_matrix(2, 6, 60 + f);
  for (std::size_t f = 0; f < 2; ++f) {
    const double full = std::log(std::abs(dm.matrix(f).determinant()));
    const double w = std::log(std::abs(dm.separation(f).determinant()));
    CHECK(full == doctest::Approx(w).epsilon(1e-12));
  }
}

TEST_CASE("structure check catches a modified lower block") {
  ExtendedDemixer dm(3, 2, TapConfig{1, 1});
  CHECK_NOTHROW(dm.check_structure());
  dm.matrix(1)(3, 0) = 1e-300;
  CHECK_FALSE(dm.lower_block_intact(1));
  CHECK_THROWS_AS(dm.check_structure(), NumericalError);
}
