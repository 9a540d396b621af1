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
#include <numeric>

#include "doctest.h"
#include "drbss/common.hpp"
#include "drbss/sim.hpp"
#include "helpers.hpp"

using namespace drbss;

namespace {

double energy(const std::vector<double>& v, std::size_t from = 0, std::size_t to = SIZE_MAX) {
  double acc = 0.0;
  for (std::size_t i = from; i < std::min(to, v.size()); ++i) acc += v[i] * v[i];
  return acc;
}

/// Direct O(S L) convolution.
std::vector<double> naive_convolve(const std::vector<double>& x, const std::vector<double>& h,
                                   std::size_t length) {
  std::vector<double> y(length, 0.0);
  for (std::size_t t = 0; t < length; ++t)
    for (std::size_t k = 0; k < h.size() && k <= t; ++k)
      if (t - k < x.size()) y[t] += h[k] * x[t - k];
  return y;
}

}  // namespace

TEST_CASE("FFT convolution matches the direct sum") {
  const auto x = test::random_signal(1, 1000, 1)[0];
  const auto h = test::random_signal(1, 333, 2)[0];
  for (std::size_t len : {1000u, 1332u, 500u}) {
    const auto fast = convolve(x, h, len);
    const auto slow = naive_convolve(x, h, len);
    REQUIRE(fast.size() == len);
    double worst = 0.0;
    for (std::size_t i = 0; i < len; ++i) worst = std::max(worst, std::abs(fast[i] - slow[i]));
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("impulse responses have the requested shape") {
  RoomConfig cfg;
  cfg.rt60 = 0.25;
  cfg.drr_db = 3.0;
  cfg.seed = 11;
  for (std::size_t n = 0; n < 2; ++n)
    for (std::size_t m = 0; m < 2; ++m) {
      const auto h = make_rir(cfg, n, m);
      const std::size_t d = cfg.direct_delay(n, m);
      const double g = cfg.direct_gain(n, m);
      CHECK(h.size() == 4000);
      CHECK(d <= cfg.max_delay);
      CHECK(h[d] == g);
      for (std::size_t k = 0; k < d; ++k) CHECK(h[k] == 0.0);
      const double drr = 10.0 * std::log10(g * g / energy(h, d + 1));
      CHECK(drr == doctest::Approx(3.0).epsilon(1e-10));
      // The tail decays by 60 dB over rt60: compare the first and last tenths.
      const double head = energy(h, d + 1, 400), tail = energy(h, 3600);
      CHECK(10.0 * std::log10(head / tail) > 40.0);
    }
  CHECK(cfg.direct_gain(0, 0) == 1.0);
  CHECK(cfg.direct_gain(1, 0) == 1.0);
  CHECK(cfg.direct_gain(0, 1) >= 0.6);
  CHECK(cfg.direct_gain(0, 1) < 1.0);
}

TEST_CASE("zero rt60 gives a pure delay") {
  RoomConfig cfg;
  cfg.rt60 = 0.0;
  const auto h = make_rir(cfg, 0, 1);
  CHECK(h.size() == cfg.direct_delay(0, 1) + 1);
  CHECK(h.back() == cfg.direct_gain(0, 1));
}

TEST_CASE("mixtures are the sum of the images plus noise") {
  RoomConfig cfg;
  cfg.n_src = 3;
  cfg.snr = 100.0;
  cfg.seed = 5;
  const Signal src = builtin_sources(3, 16000, cfg.fs, 5);
  const Mixture m = mix(src, cfg);
  REQUIRE(m.mixture.size() == 3);
  CHECK(m.sigma2 == doctest::Approx(0.03));
  for (std::size_t mic = 0; mic < 3; ++mic)
    for (std::size_t t = 0; t < 16000; t += 97) {
      double sum = 0.0;
      for (std::size_t n = 0; n < 3; ++n) sum += m.images[n][mic][t];
      sum += m.noise[mic][t];
      CHECK(m.mixture[mic][t] == sum);
    }
  for (std::size_t n = 0; n < 3; ++n) {
    CHECK(energy(m.images[n][0]) / 16000.0 == doctest::Approx(1.0).epsilon(1e-12));
    // The direct image is the delayed, scaled dry source.
    const std::size_t d = cfg.direct_delay(n, 1);
    CHECK(m.direct[n][1][d + 100] == cfg.direct_gain(n, 1) * m.anechoic[n][100]);
  }
  const double noise_power = energy(m.noise[0]) / 16000.0;
  CHECK(noise_power == doctest::Approx(0.03).epsilon(0.05));
}

TEST_CASE("simulation is a pure function of the seed") {
  RoomConfig cfg;
  cfg.seed = 9;
  const Mixture a = mix(builtin_sources(2, 8000, cfg.fs, 9), cfg);
  const Mixture b = mix(builtin_sources(2, 8000, cfg.fs, 9), cfg);
  CHECK(a.mixture == b.mixture);
  CHECK(a.rirs == b.rirs);
  cfg.seed = 10;
  const Mixture c = mix(builtin_sources(2, 8000, cfg.fs, 9), cfg);
  CHECK(a.mixture != c.mixture);
  CHECK(builtin_sources(2, 8000, cfg.fs, 1) != builtin_sources(2, 8000, cfg.fs, 2));
}

TEST_CASE("builtin sources are non-stationary") {
  const Signal s = builtin_sources(2, 32000, 16000.0, 3);
  for (const auto& ch : s) {
    double lo = INFINITY, hi = 0.0;
    for (std::size_t b = 0; b + 1600 <= ch.size(); b += 1600) {
      const double e = energy(ch, b, b + 1600);
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
    CHECK(hi > 0.0);
    CHECK(hi > 10.0 * lo);
  }
}

TEST_CASE("invalid room configurations are rejected") {
  RoomConfig cfg;
  cfg.n_src = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = RoomConfig{};
  cfg.snr = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = RoomConfig{};
  cfg.gains = {{1.0, 0.5}};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = RoomConfig{};
  CHECK_THROWS_AS(mix(builtin_sources(3, 100, 16000.0, 0), cfg), ConfigError);
}
