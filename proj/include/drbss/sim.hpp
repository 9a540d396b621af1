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

// Synthetic convolutive mixtures: exponentially decaying noise impulse
// responses behind an integer-delay direct path, plus white sensor noise.

#ifndef DRBSS_SIM_HPP_
#define DRBSS_SIM_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "drbss/stft.hpp"

namespace drbss {

struct RoomConfig {
  std::size_t n_src = 2;  // also the number of microphones
  double rt60 = 0.3;      // seconds
  double fs = 16000.0;
  /// N / sigma^2; infinity disables the sensor noise.
  double snr = std::numeric_limits<double>::infinity();
  /// Direct-to-reverberant energy ratio of every impulse response.
  double drr_db = 0.0;
  /// Direct-path delays are drawn uniformly from [0, max_delay] samples.
  std::size_t max_delay = 8;
  std::uint64_t seed = 0;
  /// Optional N x M overrides of the direct-path gains and delays.
  std::vector<std::vector<double>> gains;
  std::vector<std::vector<std::size_t>> delays;

  void validate() const;
  double noise_variance() const;
  double direct_gain(std::size_t n, std::size_t m) const;
  std::size_t direct_delay(std::size_t n, std::size_t m) const;
};

/// Impulse response from source n to microphone m.
std::vector<double> make_rir(const RoomConfig& cfg, std::size_t n, std::size_t m);

struct Mixture {
  Signal mixture;                   // [M][S]
  std::vector<Signal> images;       // reverberant source images [N][M][S]
  std::vector<Signal> direct;       // direct-path images [N][M][S]
  Signal anechoic;                  // normalized dry sources [N][S]
  Signal noise;                     // [M][S]
  std::vector<Signal> rirs;         // [N][M][len]
  double sigma2 = 0.0;
};

/// Convolves and sums. Each source is first scaled so that its image at
/// microphone 1 has unit mean power.
Mixture mix(const Signal& sources, const RoomConfig& cfg);

/// Seeded test material: two AR(2) resonances per source, each gated by a
/// slowly varying random envelope.
Signal builtin_sources(std::size_t n_src, std::size_t length, double fs, std::uint64_t seed);

/// Full-length linear convolution truncated to the first `length` samples.
std::vector<double> convolve(const std::vector<double>& x, const std::vector<double>& h,
                             std::size_t length);

}  // namespace drbss

#endif  // DRBSS_SIM_HPP_
