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

// Joint dereverberation and separation on the unified filter: iterative
// projection (ILRMA-T-IP), source steering with a joint block solve for the
// prediction taps (ILRMA-T-ISS-JOINT), and fully sequential source steering
// (ILRMA-T-ISS-SEQ). The separation-only baselines are the L = 0 cases of
// the same code, and WPE pre-processing is available as a cascade.

#ifndef DRBSS_ILRMA_T_HPP_
#define DRBSS_ILRMA_T_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "drbss/linalg.hpp"
#include "drbss/model.hpp"
#include "drbss/nmf.hpp"
#include "drbss/separation.hpp"
#include "drbss/stft.hpp"

namespace drbss {

enum class Variant {
  IlrmaIp,
  IlrmaIss,
  IlrmaTIp,
  IlrmaTIssJoint,
  IlrmaTIssSeq,
  Wpe,
  WpeThenIlrmaIp,
  WpeThenIlrmaIss,
};

std::string_view to_string(Variant v);
/// Accepts the canonical names ("ilrma-t-iss-seq", ...) case-insensitively.
Variant parse_variant(std::string_view name);
const std::vector<Variant>& all_variants();

/// True for the three unified-filter variants (which use the taps).
bool uses_prediction_taps(Variant v);

/// Expected solves per iteration and frequency bin for N sources.
std::uint64_t solves_per_iteration(Variant v, std::size_t n_src);

struct SeparationConfig {
  std::size_t iterations = 100;
  TapConfig taps{5, 2};
  std::size_t bases = 2;
  std::uint64_t seed = 0;
  std::size_t wpe_iterations = 3;
  /// Verify the fixed [0 I] block after every iteration.
  bool check_structure = true;
};

/// Mutable state of one ILRMA / ILRMA-T run.
class SeparationState {
 public:
  SeparationState(const Spectrogram& x, TapConfig taps, std::size_t bases, std::uint64_t seed);

  StackedObservation observation;
  ExtendedDemixer demixer;
  Spectrogram outputs;
  NmfVarianceModel model;
  SourceTensor variance;
  SourceTensor inv_variance;
  SourceTensor power;
  std::vector<SolveCounter> solves;  // per frequency

  std::size_t n_src() const { return demixer.n_src(); }
  std::size_t n_freq() const { return demixer.n_freq(); }
  std::uint64_t total_solves() const;

  /// inv_variance = 1 / variance
  void refresh_weights();
  /// power = |outputs|^2
  void refresh_power();
  /// Recomputes outputs from the demixer.
  void recompute_outputs();

  OutputRows output_rows(std::size_t f);
  WeightRows weight_rows(std::size_t f) const;
};

/// Negative log-likelihood
///   sum_f -2T log|det W_f| + sum_{n,f,t} (|y|^2 / r + log r).
/// Throws NumericalError on a singular W_f.
double cost(const ExtendedDemixer& dm, const Spectrogram& y, const SourceTensor& r);

// Filter passes over every frequency with the variances held fixed.
void ip_pass(SeparationState& s);
void iss_pass(SeparationState& s);
void joint_dereverb_pass(SeparationState& s);
void seq_dereverb_pass(SeparationState& s);

/// Dereverberation block of the JOINT update at one frequency: for every
/// source m, v_m = (sum_t y_m xbar^H / r_m)(sum_t xbar xbar^H / r_m)^{-1} is
/// subtracted from the prediction part of row m. Returns the v_m as rows.
Eigen::MatrixXcd joint_dereverb_block(SeparationState& s, std::size_t f);

/// NMF sweep on the current outputs (bases, then activations), then weights.
void source_model_pass(SeparationState& s);

// Full outer iterations: filter pass(es) followed by the NMF sweep.
void ilrma_t_ip_iteration(SeparationState& s);
void ilrma_t_iss_joint_iteration(SeparationState& s);
void ilrma_t_iss_seq_iteration(SeparationState& s);

/// Restores output scale onto microphone 1: lambda_{n,f} = [W_f^{-1}]_{1,n},
/// y_{n,f,t} <- lambda_{n,f} y_{n,f,t}. One solve per frequency. Returns the
/// scales as an (N x F) matrix.
Eigen::MatrixXcd projection_back(const ExtendedDemixer& dm, Spectrogram& y,
                                 SolveCounter& counter);

/// Multiplies the top rows of the demixer by the projection-back scales.
void scale_demixer(ExtendedDemixer& dm, const Eigen::MatrixXcd& scales);

struct CostTrace {
  std::vector<double> cost;                      // iterations + 1 entries
  std::vector<std::uint64_t> cumulative_solves;  // iterations + 1 entries
  std::vector<double> wall_ms;                   // cumulative, iterations + 1
  std::uint64_t init_solves = 0;                 // WPE pre-processing
  std::uint64_t projection_solves = 0;
};

struct RunResult {
  Spectrogram output;
  CostTrace trace;
  ExtendedDemixer demixer;        // before projection back
  Eigen::MatrixXcd scales;        // projection-back scales (N x F); empty if not applied
  std::size_t n_freq = 0;
};

/// Called after the initial cost (iteration 0) and after every iteration.
using IterationObserver = std::function<void(std::size_t, const SeparationState&)>;

/// Runs one variant end to end. With zero iterations the outputs are the
/// input channels and no projection back is applied.
RunResult run(Variant variant, const Spectrogram& x, const SeparationConfig& cfg,
              const IterationObserver& observer = {});

}  // namespace drbss

#endif  // DRBSS_ILRMA_T_HPP_
