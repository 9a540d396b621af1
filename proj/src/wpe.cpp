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

#include "drbss/wpe.hpp"

#include <algorithm>
#include <cmath>

#include <tbb/parallel_for.h>

#include "drbss/kernels.hpp"

namespace drbss {

WpeState wpe_init(const Spectrogram& x, TapConfig taps) {
  taps.validate();
  if (taps.taps == 0) throw ConfigError("wpe: at least one prediction tap is required");
  WpeState state;
  state.taps = taps;
  const auto m = static_cast<Eigen::Index>(x.n_chan());
  const auto past = static_cast<Eigen::Index>(x.n_chan() * taps.taps);
  state.prediction.assign(x.n_freq(), Eigen::MatrixXcd::Zero(m, past));
  state.variance = wpe_variance_update(x);
  return state;
}

std::vector<Eigen::MatrixXcd> wpe_filter_update(const WpeState& state,
                                                const StackedObservation& sx,
                                                SolveCounter& counter) {
  if (sx.n_frames() == 0) throw NumericalError("wpe: no frames to accumulate statistics over");
  if (sx.taps().taps == 0) throw ConfigError("wpe: at least one prediction tap is required");
  const std::size_t n_chan = sx.n_chan();
  const std::size_t past = sx.n_past_rows();
  std::vector<Eigen::MatrixXcd> out(sx.n_freq());
  std::vector<SolveCounter> local(sx.n_freq());

  tbb::parallel_for(std::size_t{0}, sx.n_freq(), [&](std::size_t f) {
    RowSet rows(past);
    for (std::size_t j = 0; j < past; ++j) rows[j] = sx.row(f, n_chan + j);
    const auto r = state.variance.series(0, f);
    std::vector<double> w(r.size());
    for (std::size_t t = 0; t < r.size(); ++t) w[t] = 1.0 / r[t];

    const Eigen::MatrixXcd gram = weighted_gram(rows, w);
    Eigen::MatrixXcd cross(static_cast<Eigen::Index>(past), static_cast<Eigen::Index>(n_chan));
    for (std::size_t m = 0; m < n_chan; ++m)
      cross.col(static_cast<Eigen::Index>(m)) = weighted_cross(rows, sx.row(f, m), w);
    const Eigen::MatrixXcd u =
        solve_hermitian_loaded(gram, cross, local[f], static_cast<long>(f));
    out[f] = u.adjoint();
  });
  for (const auto& c : local) counter.add(c.count);
  return out;
}

Spectrogram wpe_dereverb(const std::vector<Eigen::MatrixXcd>& prediction,
                         const StackedObservation& sx) {
  const std::size_t n_chan = sx.n_chan();
  const std::size_t past = sx.n_past_rows();
  Spectrogram z(sx.n_freq(), sx.n_frames(), n_chan, sx.stft_config(), sx.signal_length());
  for (std::size_t f = 0; f < sx.n_freq(); ++f) {
    const auto& zbar = prediction.at(f);
    if (static_cast<std::size_t>(zbar.rows()) != n_chan ||
        static_cast<std::size_t>(zbar.cols()) != past)
      throw ConfigError("wpe: prediction matrix shape does not match taps");
    for (std::size_t m = 0; m < n_chan; ++m) {
      auto out = z.series(f, m);
      auto x = sx.row(f, m);
      std::copy(x.begin(), x.end(), out.begin());
      for (std::size_t j = 0; j < past; ++j)
        kernels::caxpy(out, -zbar(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(j)),
                       sx.row(f, n_chan + j));
    }
  }
  return z;
}

SourceTensor wpe_variance_update(const Spectrogram& z) {
  SourceTensor r(1, z.n_freq(), z.n_frames());
  const double inv_m = 1.0 / static_cast<double>(z.n_chan());
  std::vector<double> p(z.n_frames());
  for (std::size_t f = 0; f < z.n_freq(); ++f) {
    auto rs = r.series(0, f);
    for (std::size_t m = 0; m < z.n_chan(); ++m) {
      kernels::cabs2(z.series(f, m), p);
      kernels::daxpy(rs, inv_m, p);
    }
    for (double& v : rs) v = std::max(v, kVarianceFloor);
  }
  return r;
}

double wpe_objective(const Spectrogram& z, const SourceTensor& r) {
  const double inv_m = 1.0 / static_cast<double>(z.n_chan());
  double acc = 0.0;
  for (std::size_t f = 0; f < z.n_freq(); ++f) {
    auto rs = r.series(0, f);
    std::vector<double> w(rs.size());
    for (std::size_t t = 0; t < rs.size(); ++t) w[t] = 1.0 / rs[t];
    for (std::size_t m = 0; m < z.n_chan(); ++m)
      acc += inv_m * kernels::cnorm2w(z.series(f, m), w);
    for (double v : rs) acc += std::log(v);
  }
  return acc;
}

WpeResult wpe_run(const Spectrogram& x, TapConfig taps, std::size_t iters,
                  SolveCounter& counter) {
  if (iters == 0) throw ConfigError("wpe: at least one iteration is required");
  WpeResult res;
  res.state = wpe_init(x, taps);
  const StackedObservation sx(x, taps);
  res.output = x;
  res.objective.push_back(wpe_objective(res.output, res.state.variance));
  for (std::size_t it = 0; it < iters; ++it) {
    res.state.prediction = wpe_filter_update(res.state, sx, counter);
    res.output = wpe_dereverb(res.state.prediction, sx);
    res.state.variance = wpe_variance_update(res.output);
    res.objective.push_back(wpe_objective(res.output, res.state.variance));
  }
  return res;
}

}  // namespace drbss
