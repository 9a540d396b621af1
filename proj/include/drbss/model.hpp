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

#ifndef DRBSS_MODEL_HPP_
#define DRBSS_MODEL_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "drbss/common.hpp"
#include "drbss/stft.hpp"

namespace drbss {

/// Prediction taps (number of past frames) and the delay before the first one.
struct TapConfig {
  std::size_t taps = 5;
  std::size_t delay = 2;

  void validate() const {
    if (delay < 1) throw ConfigError("taps: delay must be at least one frame");
  }
  bool operator==(const TapConfig&) const = default;
};

/// The tap-stacked observation: per (f, t), rows 0..N-1 hold the current
/// frame and block b >= 1 holds the frame t - delay - (b - 1). Frames before
/// the start read as zero. Rows are exposed as contiguous time series that
/// alias one zero-prefixed copy of each channel, so no data is duplicated.
class StackedObservation {
 public:
  StackedObservation(const Spectrogram& x, TapConfig taps);

  std::size_t n_freq() const { return n_freq_; }
  std::size_t n_frames() const { return n_frames_; }
  std::size_t n_chan() const { return n_chan_; }
  /// N(L+1)
  std::size_t n_rows() const { return n_chan_ * (taps_.taps + 1); }
  /// NL, the past-only part.
  std::size_t n_past_rows() const { return n_chan_ * taps_.taps; }
  const TapConfig& taps() const { return taps_; }
  const StftConfig& stft_config() const { return cfg_; }
  std::size_t signal_length() const { return signal_length_; }

  /// Frame offset of stacking block b.
  std::size_t shift(std::size_t block) const {
    return block == 0 ? 0 : taps_.delay + block - 1;
  }

  /// Element n of the stacked vector, over all frames.
  std::span<const cplx> row(std::size_t f, std::size_t n) const;

  cplx at(std::size_t f, std::size_t t, std::size_t n) const { return row(f, n)[t]; }

  /// Materialized stacked vector at (f, t).
  Eigen::VectorXcd vector(std::size_t f, std::size_t t) const;

 private:
  std::size_t n_freq_, n_frames_, n_chan_;
  TapConfig taps_;
  StftConfig cfg_;
  std::size_t signal_length_;
  std::size_t pad_;
  std::vector<cplx> data_;  // [f][m][pad_ + T]
};

/// Per-frequency unified filter of size N(L+1) x N(L+1). The top N rows are
/// P_f = [W_f | B_f]; the remaining rows are the canonical basis rows and
/// are never written after construction.
class ExtendedDemixer {
 public:
  /// P_f = [I | 0] at every frequency.
  ExtendedDemixer(std::size_t n_freq, std::size_t n_src, TapConfig taps);

  std::size_t n_freq() const { return mats_.size(); }
  std::size_t n_src() const { return n_src_; }
  std::size_t dim() const { return dim_; }
  const TapConfig& taps() const { return taps_; }

  Eigen::MatrixXcd& matrix(std::size_t f) { return mats_[f]; }
  const Eigen::MatrixXcd& matrix(std::size_t f) const { return mats_[f]; }

  Eigen::MatrixXcd top(std::size_t f) const { return mats_[f].topRows(n_src_); }
  Eigen::MatrixXcd separation(std::size_t f) const {
    return mats_[f].topLeftCorner(n_src_, n_src_);
  }

  /// True when rows n >= N are exactly e_n^T.
  bool lower_block_intact(std::size_t f) const;
  /// Throws NumericalError naming the first frequency whose lower block drifted.
  void check_structure() const;

 private:
  std::size_t n_src_, dim_;
  TapConfig taps_;
  std::vector<Eigen::MatrixXcd> mats_;
};

/// y_{f,t} = P_f x~_{f,t}; N output channels.
Spectrogram demix(const ExtendedDemixer& dm, const StackedObservation& sx);

/// Recomputes output n at frequency f from scratch.
void demix_row(const ExtendedDemixer& dm, const StackedObservation& sx, std::size_t f,
               std::size_t n, std::span<cplx> out);

/// Separation matrices W_f and prediction matrices Zbar_f with P_f = W_f [I, -Zbar_f].
struct WarevDecomposition {
  std::vector<Eigen::MatrixXcd> separation;
  std::vector<Eigen::MatrixXcd> prediction;
};

WarevDecomposition extract_warev(const ExtendedDemixer& dm);

/// Builds the unified filter from (W_f, Zbar_f) pairs.
ExtendedDemixer compose_demixer(const WarevDecomposition& parts, TapConfig taps);

}  // namespace drbss

#endif  // DRBSS_MODEL_HPP_
