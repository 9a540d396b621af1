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

// Objective evaluation: SI-SDR, SI-SIR, cepstral distance and the
// source-to-estimate assignment. All values are in dB, capped at +-80.

#ifndef DRBSS_METRICS_HPP_
#define DRBSS_METRICS_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace drbss {

inline constexpr double kMetricCapDb = 80.0;

double si_sdr(std::span<const double> reference, std::span<const double> estimate);

/// Least-squares decomposition of the estimate onto all references; the
/// target part is the component along references[target].
double si_sir(const std::vector<std::vector<double>>& references,
              std::span<const double> estimate, std::size_t target);

/// Mean real-cepstrum distance over 32 ms half-overlapping frames, using
/// coefficients 1..24 and frames within 40 dB of the loudest reference frame.
double cepstral_distance(std::span<const double> reference, std::span<const double> estimate,
                         double sample_rate);

/// perm[n] is the estimate assigned to reference n; maximizes the summed
/// SI-SDR over all N! assignments, ties going to the lexicographically first.
std::vector<std::size_t> align_permutation(const std::vector<std::vector<double>>& references,
                                           const std::vector<std::vector<double>>& estimates);

struct EvalReport {
  std::vector<std::size_t> permutation;
  std::vector<double> si_sdr, si_sir, cd;
  /// Metrics of the unprocessed reference-microphone signal.
  std::vector<double> mix_si_sdr, mix_si_sir, mix_cd;
  std::vector<double> delta_si_sdr, delta_si_sir;

  double mean_si_sdr() const;
  double mean_si_sir() const;
  double mean_cd() const;
  double mean_delta_si_sdr() const;
  double mean_delta_si_sir() const;
};

/// Aligns the estimates, then scores them and the unprocessed mixture (the
/// reference-microphone channel, used as the estimate of every source).
EvalReport evaluate(const std::vector<std::vector<double>>& references,
                    const std::vector<std::vector<double>>& estimates,
                    std::span<const double> mixture, double sample_rate);

}  // namespace drbss

#endif  // DRBSS_METRICS_HPP_
