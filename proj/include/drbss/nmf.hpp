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

#ifndef DRBSS_NMF_HPP_
#define DRBSS_NMF_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "drbss/common.hpp"

namespace drbss {

/// Real nonnegative tensor indexed (n, f, t), contiguous in t. Holds source
/// variances r and output powers |y|^2.
class SourceTensor {
 public:
  SourceTensor() = default;
  SourceTensor(std::size_t n_src, std::size_t n_freq, std::size_t n_frames, double fill = 0.0)
      : n_src_(n_src), n_freq_(n_freq), n_frames_(n_frames),
        data_(n_src * n_freq * n_frames, fill) {}

  std::size_t n_src() const { return n_src_; }
  std::size_t n_freq() const { return n_freq_; }
  std::size_t n_frames() const { return n_frames_; }

  double& at(std::size_t n, std::size_t f, std::size_t t) {
    return data_[(n * n_freq_ + f) * n_frames_ + t];
  }
  double at(std::size_t n, std::size_t f, std::size_t t) const {
    return data_[(n * n_freq_ + f) * n_frames_ + t];
  }
  std::span<double> series(std::size_t n, std::size_t f) {
    return {data_.data() + (n * n_freq_ + f) * n_frames_, n_frames_};
  }
  std::span<const double> series(std::size_t n, std::size_t f) const {
    return {data_.data() + (n * n_freq_ + f) * n_frames_, n_frames_};
  }
  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  bool operator==(const SourceTensor&) const = default;

 private:
  std::size_t n_src_ = 0, n_freq_ = 0, n_frames_ = 0;
  std::vector<double> data_;
};

/// Low-rank variance model r_{n,f,t} = sum_k b_{n,k,f} a_{n,t,k}, floored.
class NmfVarianceModel {
 public:
  NmfVarianceModel(std::size_t n_src, std::size_t n_bases, std::size_t n_freq,
                   std::size_t n_frames, double floor = kVarianceFloor);

  std::size_t n_src() const { return n_src_; }
  std::size_t n_bases() const { return n_bases_; }
  std::size_t n_freq() const { return n_freq_; }
  std::size_t n_frames() const { return n_frames_; }
  double floor() const { return floor_; }

  double& basis(std::size_t n, std::size_t k, std::size_t f) {
    return bases_[(n * n_bases_ + k) * n_freq_ + f];
  }
  double basis(std::size_t n, std::size_t k, std::size_t f) const {
    return bases_[(n * n_bases_ + k) * n_freq_ + f];
  }
  double& activation(std::size_t n, std::size_t t, std::size_t k) {
    return acts_[(n * n_bases_ + k) * n_frames_ + t];
  }
  double activation(std::size_t n, std::size_t t, std::size_t k) const {
    return acts_[(n * n_bases_ + k) * n_frames_ + t];
  }
  /// Activation of basis k over all frames.
  std::span<double> activations(std::size_t n, std::size_t k) {
    return {acts_.data() + (n * n_bases_ + k) * n_frames_, n_frames_};
  }
  std::span<const double> activations(std::size_t n, std::size_t k) const {
    return {acts_.data() + (n * n_bases_ + k) * n_frames_, n_frames_};
  }

  bool operator==(const NmfVarianceModel&) const = default;

 private:
  std::size_t n_src_, n_bases_, n_freq_, n_frames_;
  double floor_;
  std::vector<double> bases_;  // [n][k][f]
  std::vector<double> acts_;   // [n][k][t]
};

/// b = 1, a ~ U[0.1, 1) drawn in (n, t, k) order from a seeded mt19937_64.
NmfVarianceModel init_model(std::size_t n_src, std::size_t n_bases, std::size_t n_freq,
                            std::size_t n_frames, std::uint64_t seed);

SourceTensor variance(const NmfVarianceModel& model);

/// Recomputes r for one source in place.
void refresh_variance(const NmfVarianceModel& model, std::size_t n, SourceTensor& r);

/// One multiplicative Itakura-Saito sweep: bases, refresh r, activations,
/// refresh r. `r` must hold variance(model) on entry and holds the updated
/// variances on return.
void nmf_update(NmfVarianceModel& model, const SourceTensor& power, SourceTensor& r);

/// sum_{f,t} (p / r + log r) for source n.
double source_model_cost(const SourceTensor& power, const SourceTensor& r, std::size_t n);

}  // namespace drbss

#endif  // DRBSS_NMF_HPP_
