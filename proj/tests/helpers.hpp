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

// Shared fixtures for the unit tests: seeded random signals and tensors.

#ifndef DRBSS_TESTS_HELPERS_HPP_
#define DRBSS_TESTS_HELPERS_HPP_

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "drbss/ilrma_t.hpp"
#include "drbss/nmf.hpp"
#include "drbss/sim.hpp"
#include "drbss/stft.hpp"

namespace drbss::test {

inline Signal random_signal(std::size_t n_chan, std::size_t length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Signal s(n_chan, std::vector<double>(length));
  for (auto& c : s)
    for (double& v : c) v = g(rng);
  return s;
}

inline Spectrogram random_spectrogram(std::size_t n_freq, std::size_t n_frames,
                                      std::size_t n_chan, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Spectrogram x(n_freq, n_frames, n_chan);
  for (cplx& v : x.raw()) v = cplx(g(rng), g(rng));
  return x;
}

inline Eigen::MatrixXcd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

inline SourceTensor random_positive(std::size_t n, std::size_t f, std::size_t t,
                                    std::uint64_t seed, double lo = 0.2, double hi = 2.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  SourceTensor r(n, f, t);
  for (double& v : r.raw()) v = u(rng);
  return r;
}

/// Reverberant 2 x 2 (or N x N) desk instance in the STFT domain.
inline Spectrogram desk_mixture(std::size_t n_src, std::uint64_t seed, double seconds,
                                std::size_t frame, double rt60 = 0.3) {
  RoomConfig room;
  room.n_src = n_src;
  room.rt60 = rt60;
  room.seed = seed;
  const auto len = static_cast<std::size_t>(seconds * room.fs);
  const Mixture m = mix(builtin_sources(n_src, len, room.fs, seed), room);
  StftConfig cfg;
  cfg.frame_len = frame;
  cfg.hop = frame / 4;
  return analyze(m.mixture, cfg);
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace drbss::test

#endif  // DRBSS_TESTS_HELPERS_HPP_
