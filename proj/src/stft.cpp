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

#include "drbss/stft.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"

namespace drbss {

void StftConfig::validate() const {
  if (frame_len < 2 || (frame_len & (frame_len - 1)) != 0)
    throw ConfigError("stft: frame length must be a power of two, got " +
                      std::to_string(frame_len));
  if (hop == 0 || frame_len % hop != 0)
    throw ConfigError("stft: hop must divide the frame length");
  if (frame_len < 2 * hop)
    throw ConfigError("stft: frame length must be at least twice the hop");
  if (!(sample_rate > 0.0)) throw ConfigError("stft: sample rate must be positive");
}

Spectrogram::Spectrogram(std::size_t n_freq, std::size_t n_frames, std::size_t n_chan,
                         StftConfig cfg, std::size_t signal_length)
    : n_freq_(n_freq),
      n_frames_(n_frames),
      n_chan_(n_chan),
      cfg_(cfg),
      signal_length_(signal_length),
      data_(n_freq * n_frames * n_chan) {}

std::size_t frame_count(std::size_t length, const StftConfig& cfg) {
  const std::size_t pad = cfg.edge_pad();
  const std::size_t extra = (cfg.hop - length % cfg.hop) % cfg.hop;
  const std::size_t padded = length + 2 * pad + extra;
  return (padded - cfg.frame_len) / cfg.hop + 1;
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n));
  return w;
}

std::vector<double> dual_window(std::span<const double> analysis, std::size_t hop) {
  const std::size_t n = analysis.size();
  std::vector<double> dual(n);
  for (std::size_t i = 0; i < n; ++i) {
    double denom = 0.0;
    for (std::size_t j = i % hop; j < n; j += hop) denom += analysis[j] * analysis[j];
    if (denom < 1e-12)
      throw ConfigError("stft: overlap-add denominator vanishes; window/hop pair not invertible");
    dual[i] = analysis[i] / denom;
  }
  return dual;
}

Spectrogram analyze(const Signal& signal, const StftConfig& cfg) {
  cfg.validate();
  if (signal.empty() || signal.front().empty())
    throw ConfigError("stft: empty signal");
  const std::size_t n_chan = signal.size();
  const std::size_t length = signal.front().size();
  for (const auto& ch : signal) {
    if (ch.size() != length) throw ConfigError("stft: channels have different lengths");
    for (double v : ch)
      if (!std::isfinite(v)) throw ConfigError("stft: non-finite sample in input");
  }
  if (length < cfg.frame_len)
    throw ConfigError("stft: signal shorter than one frame (" + std::to_string(length) +
                      " < " + std::to_string(cfg.frame_len) + ")");

  const std::size_t fl = cfg.frame_len;
  const std::size_t pad = cfg.edge_pad();
  const std::size_t n_frames = frame_count(length, cfg);
  const std::size_t padded = (n_frames - 1) * cfg.hop + fl;
  const auto window = hann_window(fl);

  Spectrogram spec(cfg.bins(), n_frames, n_chan, cfg, length);
  detail::RealFft fft(fl);
  std::vector<double> xpad(padded), frame(fl);
  std::vector<cplx> bins(cfg.bins());
  for (std::size_t m = 0; m < n_chan; ++m) {
    std::fill(xpad.begin(), xpad.end(), 0.0);
    std::copy(signal[m].begin(), signal[m].end(), xpad.begin() + static_cast<long>(pad));
    for (std::size_t t = 0; t < n_frames; ++t) {
      const double* src = xpad.data() + t * cfg.hop;
      for (std::size_t i = 0; i < fl; ++i) frame[i] = window[i] * src[i];
      fft.forward(frame.data(), bins.data());
      for (std::size_t f = 0; f < bins.size(); ++f) spec.at(f, t, m) = bins[f];
    }
  }
  return spec;
}

Signal synthesize(const Spectrogram& spec) {
  const StftConfig& cfg = spec.config();
  cfg.validate();
  if (spec.n_freq() != cfg.bins())
    throw ConfigError("stft: spectrogram has " + std::to_string(spec.n_freq()) +
                      " bins but config expects " + std::to_string(cfg.bins()));
  const std::size_t fl = cfg.frame_len;
  const std::size_t pad = cfg.edge_pad();
  const std::size_t n_frames = spec.n_frames();
  if (n_frames == 0) return Signal(spec.n_chan());
  const std::size_t padded = (n_frames - 1) * cfg.hop + fl;
  if (padded < 2 * pad) throw ConfigError("stft: too few frames to synthesize");
  std::size_t length = spec.signal_length();
  if (length == 0) length = padded - 2 * pad;
  if (length + 2 * pad > padded) throw ConfigError("stft: declared signal length exceeds frames");

  const auto window = hann_window(fl);
  const auto dual = dual_window(window, cfg.hop);
  detail::RealFft fft(fl);
  const double scale = 1.0 / static_cast<double>(fl);

  Signal out(spec.n_chan(), std::vector<double>(length));
  std::vector<double> acc(padded), frame(fl);
  std::vector<cplx> bins(cfg.bins());
  for (std::size_t m = 0; m < spec.n_chan(); ++m) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t t = 0; t < n_frames; ++t) {
      for (std::size_t f = 0; f < bins.size(); ++f) bins[f] = spec.at(f, t, m);
      fft.inverse(bins.data(), frame.data());
      double* dst = acc.data() + t * cfg.hop;
      for (std::size_t i = 0; i < fl; ++i) dst[i] += dual[i] * frame[i] * scale;
    }
    std::copy(acc.begin() + static_cast<long>(pad),
              acc.begin() + static_cast<long>(pad + length), out[m].begin());
  }
  return out;
}

}  // namespace drbss
