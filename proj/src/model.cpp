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

#include "drbss/model.hpp"

#include <string>

#include "drbss/kernels.hpp"

namespace drbss {

StackedObservation::StackedObservation(const Spectrogram& x, TapConfig taps)
    : n_freq_(x.n_freq()),
      n_frames_(x.n_frames()),
      n_chan_(x.n_chan()),
      taps_(taps),
      cfg_(x.config()),
      signal_length_(x.signal_length()) {
  taps_.validate();
  pad_ = taps_.taps == 0 ? 0 : taps_.delay + taps_.taps - 1;
  data_.assign(n_freq_ * n_chan_ * (pad_ + n_frames_), cplx(0.0, 0.0));
  for (std::size_t f = 0; f < n_freq_; ++f)
    for (std::size_t m = 0; m < n_chan_; ++m) {
      auto src = x.series(f, m);
      cplx* dst = data_.data() + (f * n_chan_ + m) * (pad_ + n_frames_) + pad_;
      std::copy(src.begin(), src.end(), dst);
    }
}

std::span<const cplx> StackedObservation::row(std::size_t f, std::size_t n) const {
  const std::size_t block = n / n_chan_;
  const std::size_t m = n % n_chan_;
  const cplx* base = data_.data() + (f * n_chan_ + m) * (pad_ + n_frames_);
  return {base + pad_ - shift(block), n_frames_};
}

Eigen::VectorXcd StackedObservation::vector(std::size_t f, std::size_t t) const {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(n_rows()));
  for (std::size_t n = 0; n < n_rows(); ++n) v(static_cast<Eigen::Index>(n)) = at(f, t, n);
  return v;
}

ExtendedDemixer::ExtendedDemixer(std::size_t n_freq, std::size_t n_src, TapConfig taps)
    : n_src_(n_src), dim_(n_src * (taps.taps + 1)), taps_(taps) {
  const auto d = static_cast<Eigen::Index>(dim_);
  mats_.assign(n_freq, Eigen::MatrixXcd::Identity(d, d));
}

bool ExtendedDemixer::lower_block_intact(std::size_t f) const {
  const auto& v = mats_[f];
  for (Eigen::Index i = static_cast<Eigen::Index>(n_src_); i < v.rows(); ++i)
    for (Eigen::Index j = 0; j < v.cols(); ++j)
      if (v(i, j) != cplx(i == j ? 1.0 : 0.0, 0.0)) return false;
  return true;
}

void ExtendedDemixer::check_structure() const {
  for (std::size_t f = 0; f < mats_.size(); ++f)
    if (!lower_block_intact(f))
      throw NumericalError("demixer: fixed [0 I] block modified at frequency " +
                               std::to_string(f),
                           static_cast<long>(f));
}

void demix_row(const ExtendedDemixer& dm, const StackedObservation& sx, std::size_t f,
               std::size_t n, std::span<cplx> out) {
  std::fill(out.begin(), out.end(), cplx(0.0, 0.0));
  const auto& v = dm.matrix(f);
  for (std::size_t j = 0; j < dm.dim(); ++j)
    kernels::caxpy(out, v(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j)),
                   sx.row(f, j));
}

Spectrogram demix(const ExtendedDemixer& dm, const StackedObservation& sx) {
  if (dm.dim() != sx.n_rows() || dm.n_freq() != sx.n_freq())
    throw ConfigError("demix: filter dimension " + std::to_string(dm.dim()) +
                      " does not match stacked observation dimension " +
                      std::to_string(sx.n_rows()));
  Spectrogram y(sx.n_freq(), sx.n_frames(), dm.n_src(), sx.stft_config(), sx.signal_length());
  for (std::size_t f = 0; f < sx.n_freq(); ++f)
    for (std::size_t n = 0; n < dm.n_src(); ++n) demix_row(dm, sx, f, n, y.series(f, n));
  return y;
}

WarevDecomposition extract_warev(const ExtendedDemixer& dm) {
  const auto n = static_cast<Eigen::Index>(dm.n_src());
  const auto past = static_cast<Eigen::Index>(dm.dim()) - n;
  WarevDecomposition out;
  out.separation.reserve(dm.n_freq());
  out.prediction.reserve(dm.n_freq());
  for (std::size_t f = 0; f < dm.n_freq(); ++f) {
    const auto& v = dm.matrix(f);
    Eigen::MatrixXcd w = v.topLeftCorner(n, n);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(w);
    if (!lu.isInvertible())
      throw NumericalError("extract_warev: singular separation matrix at frequency " +
                               std::to_string(f),
                           static_cast<long>(f));
    Eigen::MatrixXcd zbar = -lu.solve(Eigen::MatrixXcd(v.topRightCorner(n, past)));
    out.separation.push_back(std::move(w));
    out.prediction.push_back(std::move(zbar));
  }
  return out;
}

ExtendedDemixer compose_demixer(const WarevDecomposition& parts, TapConfig taps) {
  if (parts.separation.empty()) throw ConfigError("compose_demixer: no frequencies");
  const std::size_t n_src = static_cast<std::size_t>(parts.separation.front().rows());
  ExtendedDemixer dm(parts.separation.size(), n_src, taps);
  const auto n = static_cast<Eigen::Index>(n_src);
  const auto past = static_cast<Eigen::Index>(dm.dim()) - n;
  for (std::size_t f = 0; f < dm.n_freq(); ++f) {
    const auto& w = parts.separation[f];
    const auto& z = parts.prediction[f];
    if (w.rows() != n || w.cols() != n || z.rows() != n || z.cols() != past)
      throw ConfigError("compose_demixer: inconsistent block sizes");
    dm.matrix(f).topLeftCorner(n, n) = w;
    dm.matrix(f).topRightCorner(n, past) = -w * z;
  }
  return dm;
}

}  // namespace drbss
