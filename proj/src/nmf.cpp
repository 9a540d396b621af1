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

#include "drbss/nmf.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <tbb/parallel_for.h>

#include "drbss/kernels.hpp"

namespace drbss {

NmfVarianceModel::NmfVarianceModel(std::size_t n_src, std::size_t n_bases, std::size_t n_freq,
                                   std::size_t n_frames, double floor)
    : n_src_(n_src),
      n_bases_(n_bases),
      n_freq_(n_freq),
      n_frames_(n_frames),
      floor_(floor),
      bases_(n_src * n_bases * n_freq, 1.0),
      acts_(n_src * n_bases * n_frames, 1.0) {
  if (n_src == 0 || n_bases == 0 || n_freq == 0 || n_frames == 0)
    throw ConfigError("nmf: all model dimensions must be positive");
  if (!(floor > 0.0)) throw ConfigError("nmf: variance floor must be positive");
}

NmfVarianceModel init_model(std::size_t n_src, std::size_t n_bases, std::size_t n_freq,
                            std::size_t n_frames, std::uint64_t seed) {
  NmfVarianceModel model(n_src, n_bases, n_freq, n_frames);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.1, 1.0);
  const double top = std::nextafter(1.0, 0.0);
  for (std::size_t n = 0; n < n_src; ++n)
    for (std::size_t t = 0; t < n_frames; ++t)
      for (std::size_t k = 0; k < n_bases; ++k)
        model.activation(n, t, k) = std::min(uni(rng), top);
  return model;
}

void refresh_variance(const NmfVarianceModel& model, std::size_t n, SourceTensor& r) {
  for (std::size_t f = 0; f < model.n_freq(); ++f) {
    auto rs = r.series(n, f);
    std::fill(rs.begin(), rs.end(), 0.0);
    for (std::size_t k = 0; k < model.n_bases(); ++k)
      kernels::daxpy(rs, model.basis(n, k, f), model.activations(n, k));
    for (double& v : rs) v = std::max(v, model.floor());
  }
}

SourceTensor variance(const NmfVarianceModel& model) {
  SourceTensor r(model.n_src(), model.n_freq(), model.n_frames());
  for (std::size_t n = 0; n < model.n_src(); ++n) refresh_variance(model, n, r);
  return r;
}

namespace {

inline double mu_ratio(double num, double den) {
  return den > 0.0 ? std::sqrt(num / den) : 1.0;
}

void update_source(NmfVarianceModel& model, const SourceTensor& power, SourceTensor& r,
                   std::size_t n) {
  const std::size_t n_frames = model.n_frames();
  const std::size_t n_bases = model.n_bases();
  std::vector<double> q_pow(n_frames), q_inv(n_frames);

  // Bases: sums over frames.
  for (std::size_t f = 0; f < model.n_freq(); ++f) {
    auto rs = r.series(n, f);
    auto ps = power.series(n, f);
    for (std::size_t t = 0; t < n_frames; ++t) {
      q_inv[t] = 1.0 / rs[t];
      q_pow[t] = ps[t] * q_inv[t] * q_inv[t];
    }
    for (std::size_t k = 0; k < n_bases; ++k) {
      auto a = model.activations(n, k);
      model.basis(n, k, f) *= mu_ratio(kernels::ddot(a, q_pow), kernels::ddot(a, q_inv));
    }
  }
  refresh_variance(model, n, r);

  // Activations: sums over frequencies, accumulated frame-wise.
  std::vector<double> num(n_bases * n_frames, 0.0), den(n_bases * n_frames, 0.0);
  for (std::size_t f = 0; f < model.n_freq(); ++f) {
    auto rs = r.series(n, f);
    auto ps = power.series(n, f);
    for (std::size_t t = 0; t < n_frames; ++t) {
      q_inv[t] = 1.0 / rs[t];
      q_pow[t] = ps[t] * q_inv[t] * q_inv[t];
    }
    for (std::size_t k = 0; k < n_bases; ++k) {
      const double b = model.basis(n, k, f);
      kernels::daxpy({num.data() + k * n_frames, n_frames}, b, q_pow);
      kernels::daxpy({den.data() + k * n_frames, n_frames}, b, q_inv);
    }
  }
  for (std::size_t k = 0; k < n_bases; ++k) {
    auto a = model.activations(n, k);
    for (std::size_t t = 0; t < n_frames; ++t)
      a[t] *= mu_ratio(num[k * n_frames + t], den[k * n_frames + t]);
  }
  refresh_variance(model, n, r);
}

}  // namespace

void nmf_update(NmfVarianceModel& model, const SourceTensor& power, SourceTensor& r) {
  tbb::parallel_for(std::size_t{0}, model.n_src(),
                    [&](std::size_t n) { update_source(model, power, r, n); });
}

double source_model_cost(const SourceTensor& power, const SourceTensor& r, std::size_t n) {
  double acc = 0.0;
  for (std::size_t f = 0; f < r.n_freq(); ++f) {
    auto rs = r.series(n, f);
    auto ps = power.series(n, f);
    for (std::size_t t = 0; t < rs.size(); ++t) acc += ps[t] / rs[t] + std::log(rs[t]);
  }
  return acc;
}

}  // namespace drbss
