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

#include "drbss/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "drbss/common.hpp"
#include "drbss/stft.hpp"
#include "fft.hpp"

namespace drbss {

namespace {

double cap_db(double num, double den) {
  if (!(den > 0.0)) return num > 0.0 ? kMetricCapDb : -kMetricCapDb;
  if (!(num > 0.0)) return -kMetricCapDb;
  return std::clamp(10.0 * std::log10(num / den), -kMetricCapDb, kMetricCapDb);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw ConfigError(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                      std::to_string(b) + ")");
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Magnitudes below this fraction of the frame peak are clamped before the log.
constexpr double kCepstrumFloor = 1e-5;
constexpr std::size_t kCepstrumOrder = 24;

// Real cepstrum coefficients 1..kCepstrumOrder of one windowed frame.
void frame_cepstrum(detail::RealFft& fft, std::vector<double>& buf, std::vector<cplx>& spec,
                    std::vector<double>& ceps) {
  const std::size_t n = fft.size();
  fft.forward(buf.data(), spec.data());
  double peak = 0.0;
  for (const cplx& c : spec) peak = std::max(peak, std::abs(c));
  const double floor = std::max(peak * kCepstrumFloor, 1e-150);
  for (cplx& c : spec) c = std::log(std::max(std::abs(c), floor));
  fft.inverse(spec.data(), buf.data());
  for (std::size_t k = 1; k <= kCepstrumOrder; ++k) ceps[k - 1] = buf[k] / static_cast<double>(n);
}

}  // namespace

double si_sdr(std::span<const double> reference, std::span<const double> estimate) {
  check_lengths(reference.size(), estimate.size(), "si_sdr");
  const double ss = dot(reference, reference);
  if (!(ss > 0.0)) throw ConfigError("si_sdr: zero reference");
  const double alpha = dot(estimate, reference) / ss;
  double err = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double e = alpha * reference[i] - estimate[i];
    err += e * e;
  }
  return cap_db(alpha * alpha * ss, err);
}

double si_sir(const std::vector<std::vector<double>>& references,
              std::span<const double> estimate, std::size_t target) {
  const std::size_t n_src = references.size();
  if (target >= n_src) throw ConfigError("si_sir: target index out of range");
  const auto len = static_cast<Eigen::Index>(estimate.size());
  Eigen::MatrixXd s(len, static_cast<Eigen::Index>(n_src));
  for (std::size_t n = 0; n < n_src; ++n) {
    check_lengths(references[n].size(), estimate.size(), "si_sir");
    s.col(static_cast<Eigen::Index>(n)) = Eigen::Map<const Eigen::VectorXd>(references[n].data(), len);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(s);
  qr.setThreshold(1e-10);
  if (qr.rank() < static_cast<Eigen::Index>(n_src))
    throw ConfigError("si_sir: reference signals are linearly dependent");
  const Eigen::VectorXd coef = qr.solve(Eigen::Map<const Eigen::VectorXd>(estimate.data(), len));
  const auto ti = static_cast<Eigen::Index>(target);
  const Eigen::VectorXd tgt = coef(ti) * s.col(ti);
  const Eigen::VectorXd interf = s * coef - tgt;
  return cap_db(tgt.squaredNorm(), interf.squaredNorm());
}

double cepstral_distance(std::span<const double> reference, std::span<const double> estimate,
                         double sample_rate) {
  check_lengths(reference.size(), estimate.size(), "cepstral_distance");
  if (!(sample_rate > 0.0)) throw ConfigError("cepstral_distance: sample rate must be positive");
  const auto frame_len = static_cast<std::size_t>(std::lround(0.032 * sample_rate));
  const std::size_t hop = std::max<std::size_t>(frame_len / 2, 1);
  std::size_t nfft = 1;
  while (nfft < frame_len) nfft <<= 1;
  if (nfft < 2 * kCepstrumOrder + 2) nfft = 2 * kCepstrumOrder + 2;
  if (reference.size() < frame_len)
    throw ConfigError("cepstral_distance: signal shorter than one 32 ms frame");

  const std::vector<double> window = hann_window(frame_len);
  const std::size_t n_frames = (reference.size() - frame_len) / hop + 1;
  std::vector<double> energy(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i) {
    double e = 0.0;
    for (std::size_t k = 0; k < frame_len; ++k) {
      const double v = reference[i * hop + k] * window[k];
      e += v * v;
    }
    energy[i] = e;
  }
  const double peak = *std::max_element(energy.begin(), energy.end());
  if (!(peak > 0.0)) throw ConfigError("cepstral_distance: reference is silent");

  detail::RealFft fft(nfft);
  std::vector<double> buf(nfft);
  std::vector<cplx> spec(nfft / 2 + 1);
  std::vector<double> cr(kCepstrumOrder), ce(kCepstrumOrder);
  const double scale = 10.0 / std::log(10.0);
  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < n_frames; ++i) {
    if (energy[i] < peak * 1e-4) continue;
    for (auto [sig, out] : {std::pair{reference, &cr}, std::pair{estimate, &ce}}) {
      std::fill(buf.begin(), buf.end(), 0.0);
      for (std::size_t k = 0; k < frame_len; ++k) buf[k] = sig[i * hop + k] * window[k];
      frame_cepstrum(fft, buf, spec, *out);
    }
    double d2 = 0.0;
    for (std::size_t k = 0; k < kCepstrumOrder; ++k) d2 += (cr[k] - ce[k]) * (cr[k] - ce[k]);
    total += scale * std::sqrt(2.0 * d2);
    ++used;
  }
  return total / static_cast<double>(used);
}

std::vector<std::size_t> align_permutation(const std::vector<std::vector<double>>& references,
                                           const std::vector<std::vector<double>>& estimates) {
  const std::size_t n = references.size();
  if (estimates.size() != n) throw ConfigError("align_permutation: count mismatch");
  std::vector<std::vector<double>> score(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) score[i][j] = si_sdr(references[i], estimates[j]);
  std::vector<std::size_t> perm(n), best;
  std::iota(perm.begin(), perm.end(), 0);
  double best_score = -std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += score[i][perm[i]];
    if (s > best_score) {
      best_score = s;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double EvalReport::mean_si_sdr() const { return mean(si_sdr); }
double EvalReport::mean_si_sir() const { return mean(si_sir); }
double EvalReport::mean_cd() const { return mean(cd); }
double EvalReport::mean_delta_si_sdr() const { return mean(delta_si_sdr); }
double EvalReport::mean_delta_si_sir() const { return mean(delta_si_sir); }

EvalReport evaluate(const std::vector<std::vector<double>>& references,
                    const std::vector<std::vector<double>>& estimates,
                    std::span<const double> mixture, double sample_rate) {
  EvalReport rep;
  rep.permutation = align_permutation(references, estimates);
  const std::size_t n = references.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& est = estimates[rep.permutation[i]];
    rep.si_sdr.push_back(drbss::si_sdr(references[i], est));
    rep.si_sir.push_back(drbss::si_sir(references, est, i));
    rep.cd.push_back(cepstral_distance(references[i], est, sample_rate));
    rep.mix_si_sdr.push_back(drbss::si_sdr(references[i], mixture));
    rep.mix_si_sir.push_back(drbss::si_sir(references, mixture, i));
    rep.mix_cd.push_back(cepstral_distance(references[i], mixture, sample_rate));
    rep.delta_si_sdr.push_back(rep.si_sdr.back() - rep.mix_si_sdr.back());
    rep.delta_si_sir.push_back(rep.si_sir.back() - rep.mix_si_sir.back());
  }
  return rep;
}

}  // namespace drbss
