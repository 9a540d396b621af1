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

#ifndef DRBSS_WPE_HPP_
#define DRBSS_WPE_HPP_

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "drbss/linalg.hpp"
#include "drbss/model.hpp"
#include "drbss/nmf.hpp"
#include "drbss/stft.hpp"

namespace drbss {

/// Weighted prediction error dereverberation state: one M x ML prediction
/// matrix per frequency and a single-source variance r_{f,t}.
struct WpeState {
  TapConfig taps;
  std::vector<Eigen::MatrixXcd> prediction;
  SourceTensor variance;  // shape (1, F, T)
};

/// Zero prediction matrices and r = max(||x||^2 / M, floor).
WpeState wpe_init(const Spectrogram& x, TapConfig taps);

/// Solves the weighted normal equations for every frequency (one loaded
/// solve per bin, all channels as right-hand sides).
std::vector<Eigen::MatrixXcd> wpe_filter_update(const WpeState& state,
                                                const StackedObservation& sx,
                                                SolveCounter& counter);

/// z_{f,t} = x_{f,t} - Zbar_f xbar_{f,t}
Spectrogram wpe_dereverb(const std::vector<Eigen::MatrixXcd>& prediction,
                         const StackedObservation& sx);

/// r_{f,t} = max(||z_{f,t}||^2 / M, floor)
SourceTensor wpe_variance_update(const Spectrogram& z);

/// sum_{f,t} ||z||^2 / (M r) + log r
double wpe_objective(const Spectrogram& z, const SourceTensor& r);

struct WpeResult {
  Spectrogram output;
  WpeState state;
  /// Objective before the first iteration and after each one.
  std::vector<double> objective;
};

/// Alternates filter, dereverberation and variance updates `iters` times.
WpeResult wpe_run(const Spectrogram& x, TapConfig taps, std::size_t iters,
                  SolveCounter& counter);

}  // namespace drbss

#endif  // DRBSS_WPE_HPP_
