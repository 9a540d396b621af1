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

#ifndef DRBSS_STFT_HPP_
#define DRBSS_STFT_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "drbss/common.hpp"

namespace drbss {

struct StftConfig {
  std::size_t frame_len = 1024;
  std::size_t hop = 256;
  double sample_rate = 16000.0;

  std::size_t bins() const { return frame_len / 2 + 1; }
  /// Zeros added before the first and after the last sample.
  std::size_t edge_pad() const { return frame_len - hop; }
  /// Throws ConfigError unless frame_len is a power of two, hop divides it
  /// and frame_len >= 2 * hop.
  void validate() const;

  bool operator==(const StftConfig&) const = default;
};

/// Complex multichannel STFT tensor. Logically indexed (f, t, m); stored as
/// [f][m][t] so that every channel's time series is contiguous.
class Spectrogram {
 public:
  Spectrogram() = default;
  Spectrogram(std::size_t n_freq, std::size_t n_frames, std::size_t n_chan,
              StftConfig cfg = {}, std::size_t signal_length = 0);

  std::size_t n_freq() const { return n_freq_; }
  std::size_t n_frames() const { return n_frames_; }
  std::size_t n_chan() const { return n_chan_; }
  const StftConfig& config() const { return cfg_; }
  /// Length of the time-domain signal this spectrogram was analyzed from.
  std::size_t signal_length() const { return signal_length_; }

  cplx& at(std::size_t f, std::size_t t, std::size_t m) {
    return data_[(f * n_chan_ + m) * n_frames_ + t];
  }
  const cplx& at(std::size_t f, std::size_t t, std::size_t m) const {
    return data_[(f * n_chan_ + m) * n_frames_ + t];
  }

  std::span<cplx> series(std::size_t f, std::size_t m) {
    return {data_.data() + (f * n_chan_ + m) * n_frames_, n_frames_};
  }
  std::span<const cplx> series(std::size_t f, std::size_t m) const {
    return {data_.data() + (f * n_chan_ + m) * n_frames_, n_frames_};
  }

  std::vector<cplx>& raw() { return data_; }
  const std::vector<cplx>& raw() const { return data_; }

  bool same_shape(const Spectrogram& o) const {
    return n_freq_ == o.n_freq_ && n_frames_ == o.n_frames_ && n_chan_ == o.n_chan_;
  }

 private:
  std::size_t n_freq_ = 0, n_frames_ = 0, n_chan_ = 0;
  StftConfig cfg_;
  std::size_t signal_length_ = 0;
  std::vector<cplx> data_;
};

/// Real multichannel time signal, one vector per channel.
using Signal = std::vector<std::vector<double>>;

/// Number of frames produced by analyze() for a signal of `length` samples.
std::size_t frame_count(std::size_t length, const StftConfig& cfg);

/// Periodic Hann analysis window.
std::vector<double> hann_window(std::size_t n);

/// Minimum-norm dual of `analysis` for the given hop; throws ConfigError when
/// the overlap-add denominator drops below 1e-12.
std::vector<double> dual_window(std::span<const double> analysis, std::size_t hop);

Spectrogram analyze(const Signal& signal, const StftConfig& cfg);

Signal synthesize(const Spectrogram& spec);

}  // namespace drbss

#endif  // DRBSS_STFT_HPP_
