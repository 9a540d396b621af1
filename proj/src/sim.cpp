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

#include "drbss/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <tbb/parallel_for.h>

#include "drbss/common.hpp"
#include "fft.hpp"

namespace drbss {

namespace {

// Independent generator streams for the different random quantities.
enum Stream : std::uint64_t { kGeometry = 1, kTail = 2, kNoise = 3, kSource = 4 };

std::mt19937_64 stream(std::uint64_t seed, Stream s, std::uint64_t a, std::uint64_t b = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(a),
                    static_cast<std::uint32_t>(b)};
  return std::mt19937_64(seq);
}

double mean_power(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

std::vector<double> ar2(std::mt19937_64& rng, std::size_t length) {
  std::uniform_real_distribution<double> radius(0.85, 0.97);
  std::uniform_real_distribution<double> angle(0.03 * std::numbers::pi, 0.6 * std::numbers::pi);
  std::normal_distribution<double> white(0.0, 1.0);
  const double rho = radius(rng);
  const double theta = angle(rng);
  const double a1 = 2.0 * rho * std::cos(theta), a2 = -rho * rho;
  constexpr std::size_t kBurnIn = 256;
  std::vector<double> out(length);
  double y1 = 0.0, y2 = 0.0;
  for (std::size_t t = 0; t < length + kBurnIn; ++t) {
    const double y = a1 * y1 + a2 * y2 + white(rng);
    y2 = y1;
    y1 = y;
    if (t >= kBurnIn) out[t - kBurnIn] = y;
  }
  const double p = mean_power(out);
  for (double& v : out) v /= std::sqrt(p);
  return out;
}

// Piecewise-linear envelope through random knots every `seg` samples; about
// a third of the knots are silent.
std::vector<double> envelope(std::mt19937_64& rng, std::size_t length, std::size_t seg) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n_knots = length / seg + 2;
  std::vector<double> knots(n_knots);
  for (double& k : knots) {
    const double level = u(rng);
    k = u(rng) < 0.3 ? 0.0 : level * level;
  }
  if (*std::max_element(knots.begin(), knots.end()) == 0.0) knots[n_knots / 2] = 1.0;
  std::vector<double> env(length);
  for (std::size_t t = 0; t < length; ++t) {
    const std::size_t i = t / seg;
    const double frac = static_cast<double>(t % seg) / static_cast<double>(seg);
    env[t] = (1.0 - frac) * knots[i] + frac * knots[i + 1];
  }
  return env;
}

}  // namespace

void RoomConfig::validate() const {
  if (n_src < 1 || n_src > 4) throw ConfigError("sim: number of sources must be in 1..4");
  if (!(rt60 >= 0.0) || !std::isfinite(rt60)) throw ConfigError("sim: rt60 must be >= 0");
  if (!(fs > 0.0)) throw ConfigError("sim: sample rate must be positive");
  if (!(snr > 0.0)) throw ConfigError("sim: snr must be positive");
  if (!std::isfinite(drr_db)) throw ConfigError("sim: drr_db must be finite");
  const auto check_shape = [&](std::size_t rows, const auto& m, const char* what) {
    if (m.empty()) return;
    if (rows != n_src) throw ConfigError(std::string("sim: ") + what + " must be N x M");
    for (const auto& r : m)
      if (r.size() != n_src) throw ConfigError(std::string("sim: ") + what + " must be N x M");
  };
  check_shape(gains.size(), gains, "gains");
  check_shape(delays.size(), delays, "delays");
}

double RoomConfig::noise_variance() const {
  return std::isinf(snr) ? 0.0 : static_cast<double>(n_src) / snr;
}

double RoomConfig::direct_gain(std::size_t n, std::size_t m) const {
  if (!gains.empty()) return gains[n][m];
  if (m == 0) return 1.0;
  auto rng = stream(seed, kGeometry, n, m);
  std::uniform_int_distribution<std::size_t>(0, max_delay)(rng);
  return std::uniform_real_distribution<double>(0.6, 1.0)(rng);
}

std::size_t RoomConfig::direct_delay(std::size_t n, std::size_t m) const {
  if (!delays.empty()) return delays[n][m];
  auto rng = stream(seed, kGeometry, n, m);
  return std::uniform_int_distribution<std::size_t>(0, max_delay)(rng);
}

std::vector<double> make_rir(const RoomConfig& cfg, std::size_t n, std::size_t m) {
  const std::size_t d = cfg.direct_delay(n, m);
  const double g = cfg.direct_gain(n, m);
  const auto tail_len = static_cast<std::size_t>(std::floor(cfg.rt60 * cfg.fs));
  std::vector<double> h(std::max(d + 1, tail_len), 0.0);
  h[d] = g;
  if (h.size() <= d + 1) return h;

  auto rng = stream(cfg.seed, kTail, n, m);
  std::normal_distribution<double> white(0.0, 1.0);
  const double decay = -3.0 * std::log(10.0) / (cfg.rt60 * cfg.fs);
  double energy = 0.0;
  for (std::size_t k = d + 1; k < h.size(); ++k) {
    h[k] = white(rng) * std::exp(decay * static_cast<double>(k));
    energy += h[k] * h[k];
  }
  const double scale = std::sqrt(g * g * std::pow(10.0, -cfg.drr_db / 10.0) / energy);
  for (std::size_t k = d + 1; k < h.size(); ++k) h[k] *= scale;
  return h;
}

std::vector<double> convolve(const std::vector<double>& x, const std::vector<double>& h,
                             std::size_t length) {
  std::vector<double> out(length, 0.0);
  if (x.empty() || h.empty()) return out;
  std::size_t nfft = 1;
  while (nfft < x.size() + h.size() - 1) nfft <<= 1;
  detail::RealFft fft(nfft);
  std::vector<double> buf(nfft, 0.0);
  std::vector<cplx> xs(nfft / 2 + 1), hs(nfft / 2 + 1);
  std::copy(x.begin(), x.end(), buf.begin());
  fft.forward(buf.data(), xs.data());
  std::fill(buf.begin(), buf.end(), 0.0);
  std::copy(h.begin(), h.end(), buf.begin());
  fft.forward(buf.data(), hs.data());
  for (std::size_t k = 0; k < xs.size(); ++k) xs[k] *= hs[k];
  fft.inverse(xs.data(), buf.data());
  const std::size_t n = std::min(length, nfft);
  for (std::size_t i = 0; i < n; ++i) out[i] = buf[i] / static_cast<double>(nfft);
  return out;
}

Mixture mix(const Signal& sources, const RoomConfig& cfg) {
  cfg.validate();
  if (sources.size() != cfg.n_src)
    throw ConfigError("sim: expected " + std::to_string(cfg.n_src) + " sources, got " +
                      std::to_string(sources.size()));
  const std::size_t len = sources.front().size();
  if (len == 0) throw ConfigError("sim: empty source signal");
  for (const auto& s : sources)
    if (s.size() != len) throw ConfigError("sim: sources must have equal length");

  const std::size_t n_src = cfg.n_src, n_mic = cfg.n_src;
  Mixture out;
  out.sigma2 = cfg.noise_variance();
  out.rirs.assign(n_src, Signal(n_mic));
  out.images.assign(n_src, Signal(n_mic));
  out.direct.assign(n_src, Signal(n_mic, std::vector<double>(len, 0.0)));
  out.anechoic = sources;

  tbb::parallel_for(std::size_t{0}, n_src * n_mic, [&](std::size_t i) {
    const std::size_t n = i / n_mic, m = i % n_mic;
    out.rirs[n][m] = make_rir(cfg, n, m);
    out.images[n][m] = convolve(sources[n], out.rirs[n][m], len);
  });

  for (std::size_t n = 0; n < n_src; ++n) {
    const double p = mean_power(out.images[n][0]);
    if (!(p > 0.0)) throw ConfigError("sim: source " + std::to_string(n + 1) + " is silent");
    const double scale = 1.0 / std::sqrt(p);
    for (double& v : out.anechoic[n]) v *= scale;
    for (std::size_t m = 0; m < n_mic; ++m) {
      for (double& v : out.images[n][m]) v *= scale;
      const std::size_t d = cfg.direct_delay(n, m);
      const double g = cfg.direct_gain(n, m);
      for (std::size_t t = d; t < len; ++t) out.direct[n][m][t] = g * out.anechoic[n][t - d];
    }
  }

  out.noise.assign(n_mic, std::vector<double>(len, 0.0));
  if (out.sigma2 > 0.0) {
    const double sd = std::sqrt(out.sigma2);
    for (std::size_t m = 0; m < n_mic; ++m) {
      auto rng = stream(cfg.seed, kNoise, m);
      std::normal_distribution<double> white(0.0, sd);
      for (double& v : out.noise[m]) v = white(rng);
    }
  }

  out.mixture.assign(n_mic, std::vector<double>(len, 0.0));
  for (std::size_t m = 0; m < n_mic; ++m) {
    auto& x = out.mixture[m];
    for (std::size_t n = 0; n < n_src; ++n)
      for (std::size_t t = 0; t < len; ++t) x[t] += out.images[n][m][t];
    for (std::size_t t = 0; t < len; ++t) x[t] += out.noise[m][t];
  }
  return out;
}

Signal builtin_sources(std::size_t n_src, std::size_t length, double fs, std::uint64_t seed) {
  if (length == 0) throw ConfigError("sim: source length must be positive");
  const auto seg = std::max<std::size_t>(static_cast<std::size_t>(0.25 * fs), 1);
  Signal out(n_src, std::vector<double>(length, 0.0));
  for (std::size_t n = 0; n < n_src; ++n) {
    auto rng = stream(seed, kSource, n);
    for (int c = 0; c < 2; ++c) {
      const auto x = ar2(rng, length);
      const auto env = envelope(rng, length, seg);
      for (std::size_t t = 0; t < length; ++t) out[n][t] += env[t] * x[t];
    }
  }
  return out;
}

}  // namespace drbss
