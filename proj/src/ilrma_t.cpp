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

#include "drbss/ilrma_t.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <string>

#include <tbb/parallel_for.h>

#include "drbss/kernels.hpp"
#include "drbss/separation.hpp"
#include "drbss/wpe.hpp"

namespace drbss {

namespace {

constexpr std::array<std::pair<Variant, std::string_view>, 8> kVariantNames{{
    {Variant::IlrmaIp, "ilrma-ip"},
    {Variant::IlrmaIss, "ilrma-iss"},
    {Variant::IlrmaTIp, "ilrma-t-ip"},
    {Variant::IlrmaTIssJoint, "ilrma-t-iss-joint"},
    {Variant::IlrmaTIssSeq, "ilrma-t-iss-seq"},
    {Variant::Wpe, "wpe"},
    {Variant::WpeThenIlrmaIp, "wpe+ilrma-ip"},
    {Variant::WpeThenIlrmaIss, "wpe+ilrma-iss"},
}};

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  std::replace(out.begin(), out.end(), '_', '-');
  return out;
}

template <class Fn>
void for_each_freq(SeparationState& s, Fn&& fn) {
  tbb::parallel_for(std::size_t{0}, s.n_freq(), [&](std::size_t f) { fn(f); });
}

}  // namespace

std::string_view to_string(Variant v) {
  for (const auto& [var, name] : kVariantNames)
    if (var == v) return name;
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  const std::string key = lower(name);
  for (const auto& [var, canonical] : kVariantNames)
    if (key == canonical) return var;
  // Accept the CamelCase enumerator spellings as well.
  static const std::array<std::pair<std::string_view, Variant>, 8> camel{{
      {"ilrmaip", Variant::IlrmaIp},
      {"ilrmaiss", Variant::IlrmaIss},
      {"ilrmatip", Variant::IlrmaTIp},
      {"ilrmatissjoint", Variant::IlrmaTIssJoint},
      {"ilrmatissseq", Variant::IlrmaTIssSeq},
      {"wpe", Variant::Wpe},
      {"wpethenilrmaip", Variant::WpeThenIlrmaIp},
      {"wpethenilrmaiss", Variant::WpeThenIlrmaIss},
  }};
  std::string squashed;
  for (char c : key)
    if (std::isalnum(static_cast<unsigned char>(c))) squashed.push_back(c);
  for (const auto& [n, var] : camel)
    if (squashed == n) return var;
  throw ConfigError("unknown variant '" + std::string(name) + "'");
}

const std::vector<Variant>& all_variants() {
  static const std::vector<Variant> v{Variant::IlrmaIp,        Variant::IlrmaIss,
                                      Variant::IlrmaTIp,       Variant::IlrmaTIssJoint,
                                      Variant::IlrmaTIssSeq,   Variant::Wpe,
                                      Variant::WpeThenIlrmaIp, Variant::WpeThenIlrmaIss};
  return v;
}

bool uses_prediction_taps(Variant v) {
  return v == Variant::IlrmaTIp || v == Variant::IlrmaTIssJoint || v == Variant::IlrmaTIssSeq;
}

std::uint64_t solves_per_iteration(Variant v, std::size_t n_src) {
  switch (v) {
    case Variant::IlrmaIp:
    case Variant::IlrmaTIp:
    case Variant::WpeThenIlrmaIp:
      return 2 * n_src;
    case Variant::IlrmaTIssJoint:
      return n_src;
    case Variant::Wpe:
      return 1;
    case Variant::IlrmaIss:
    case Variant::IlrmaTIssSeq:
    case Variant::WpeThenIlrmaIss:
      return 0;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// State

SeparationState::SeparationState(const Spectrogram& x, TapConfig taps, std::size_t bases,
                                 std::uint64_t seed)
    : observation(x, taps),
      demixer(x.n_freq(), x.n_chan(), taps),
      outputs(x),
      model(init_model(x.n_chan(), bases, x.n_freq(), x.n_frames(), seed)),
      variance(drbss::variance(model)),
      inv_variance(x.n_chan(), x.n_freq(), x.n_frames()),
      power(x.n_chan(), x.n_freq(), x.n_frames()),
      solves(x.n_freq()) {
  if (x.n_frames() == 0) throw ConfigError("separation: spectrogram has no frames");
  refresh_weights();
}

std::uint64_t SeparationState::total_solves() const {
  std::uint64_t total = 0;
  for (const auto& c : solves) total += c.count;
  return total;
}

void SeparationState::refresh_weights() {
  const auto& r = variance.raw();
  auto& w = inv_variance.raw();
  for (std::size_t i = 0; i < r.size(); ++i) w[i] = 1.0 / r[i];
}

void SeparationState::refresh_power() {
  for (std::size_t n = 0; n < n_src(); ++n)
    for (std::size_t f = 0; f < n_freq(); ++f)
      kernels::cabs2(outputs.series(f, n), power.series(n, f));
}

void SeparationState::recompute_outputs() {
  for (std::size_t f = 0; f < n_freq(); ++f)
    for (std::size_t n = 0; n < n_src(); ++n)
      demix_row(demixer, observation, f, n, outputs.series(f, n));
}

OutputRows SeparationState::output_rows(std::size_t f) {
  OutputRows rows(n_src());
  for (std::size_t n = 0; n < n_src(); ++n) rows[n] = outputs.series(f, n);
  return rows;
}

WeightRows SeparationState::weight_rows(std::size_t f) const {
  WeightRows rows(n_src());
  for (std::size_t n = 0; n < n_src(); ++n) rows[n] = inv_variance.series(n, f);
  return rows;
}

// ---------------------------------------------------------------------------
// Cost

double cost(const ExtendedDemixer& dm, const Spectrogram& y, const SourceTensor& r) {
  const std::size_t n_src = dm.n_src();
  const auto ns = static_cast<Eigen::Index>(n_src);
  const double n_frames = static_cast<double>(y.n_frames());
  double total = 0.0;
  std::vector<double> w(y.n_frames());
  for (std::size_t f = 0; f < dm.n_freq(); ++f) {
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(dm.matrix(f).topLeftCorner(ns, ns));
    double log_abs_det = 0.0;
    for (Eigen::Index i = 0; i < ns; ++i) {
      const double d = std::abs(lu.matrixLU()(i, i));
      if (!(d > 0.0) || !std::isfinite(d))
        throw NumericalError("cost: singular separation matrix at frequency " + std::to_string(f),
                             static_cast<long>(f));
      log_abs_det += std::log(d);
    }
    total -= 2.0 * n_frames * log_abs_det;
    for (std::size_t n = 0; n < n_src; ++n) {
      auto rs = r.series(n, f);
      double log_sum = 0.0;
      for (std::size_t t = 0; t < rs.size(); ++t) {
        w[t] = 1.0 / rs[t];
        log_sum += std::log(rs[t]);
      }
      total += kernels::cnorm2w(y.series(f, n), w) + log_sum;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Filter passes

void ip_pass(SeparationState& s) {
  for_each_freq(s, [&](std::size_t f) {
    const RowSet rows = observation_rows(s.observation, f);
    auto& v = s.demixer.matrix(f);
    for (std::size_t n = 0; n < s.n_src(); ++n) {
      const Eigen::MatrixXcd g = weighted_cov(rows, s.inv_variance.series(n, f));
      ip_update_row(v, s.n_src(), g, n, s.solves[f], static_cast<long>(f));
      demix_row(s.demixer, s.observation, f, n, s.outputs.series(f, n));
    }
  });
}

void iss_pass(SeparationState& s) {
  for_each_freq(s, [&](std::size_t f) {
    const OutputRows y = s.output_rows(f);
    const WeightRows w = s.weight_rows(f);
    auto& v = s.demixer.matrix(f);
    for (std::size_t n = 0; n < s.n_src(); ++n) iss_update_source(v, s.n_src(), y, w, n);
  });
}

Eigen::MatrixXcd joint_dereverb_block(SeparationState& s, std::size_t f) {
  const std::size_t n_src = s.n_src();
  const std::size_t past = s.observation.n_past_rows();
  Eigen::MatrixXcd coef(static_cast<Eigen::Index>(n_src), static_cast<Eigen::Index>(past));
  if (past == 0) return coef;
  RowSet rows(past);
  for (std::size_t j = 0; j < past; ++j) rows[j] = s.observation.row(f, n_src + j);
  const double n_frames = static_cast<double>(s.observation.n_frames());
  auto& v = s.demixer.matrix(f);
  for (std::size_t m = 0; m < n_src; ++m) {
    const auto w = s.inv_variance.series(m, f);
    auto y = s.outputs.series(f, m);
    const Eigen::MatrixXcd gram = weighted_cov(rows, w);
    const Eigen::VectorXcd cross = weighted_cross(rows, y, w) / n_frames;
    const Eigen::VectorXcd u = solve_hermitian_loaded(gram, cross, s.solves[f], static_cast<long>(f));
    const auto mi = static_cast<Eigen::Index>(m);
    for (std::size_t j = 0; j < past; ++j) {
      const cplx vj = std::conj(u(static_cast<Eigen::Index>(j)));
      coef(mi, static_cast<Eigen::Index>(j)) = vj;
      v(mi, static_cast<Eigen::Index>(n_src + j)) -= vj;
      kernels::caxpy(y, -vj, rows[j]);
    }
  }
  return coef;
}

void joint_dereverb_pass(SeparationState& s) {
  for_each_freq(s, [&](std::size_t f) { joint_dereverb_block(s, f); });
}

void seq_dereverb_pass(SeparationState& s) {
  for_each_freq(s, [&](std::size_t f) {
    const std::size_t n_src = s.n_src();
    auto& v = s.demixer.matrix(f);
    for (std::size_t n = n_src; n < s.demixer.dim(); ++n) {
      const auto xn = s.observation.row(f, n);
      for (std::size_t m = 0; m < n_src; ++m) {
        const auto w = s.inv_variance.series(m, f);
        const double den = kernels::cnorm2w(xn, w);
        if (!(den > kDenominatorGuard)) continue;
        auto y = s.outputs.series(f, m);
        const cplx c = kernels::cdotw(y, xn, w) / den;
        v(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) -= c;
        kernels::caxpy(y, -c, xn);
      }
    }
  });
}

void source_model_pass(SeparationState& s) {
  s.refresh_power();
  nmf_update(s.model, s.power, s.variance);
  s.refresh_weights();
}

void ilrma_t_ip_iteration(SeparationState& s) {
  ip_pass(s);
  source_model_pass(s);
}

void ilrma_t_iss_joint_iteration(SeparationState& s) {
  iss_pass(s);
  joint_dereverb_pass(s);
  source_model_pass(s);
}

void ilrma_t_iss_seq_iteration(SeparationState& s) {
  iss_pass(s);
  seq_dereverb_pass(s);
  source_model_pass(s);
}

// ---------------------------------------------------------------------------
// Projection back

Eigen::MatrixXcd projection_back(const ExtendedDemixer& dm, Spectrogram& y,
                                 SolveCounter& counter) {
  const auto ns = static_cast<Eigen::Index>(dm.n_src());
  Eigen::MatrixXcd scales(ns, static_cast<Eigen::Index>(dm.n_freq()));
  const Eigen::VectorXcd e0 = Eigen::VectorXcd::Unit(ns, 0);
  for (std::size_t f = 0; f < dm.n_freq(); ++f) {
    // Row 0 of W^{-1} is the solution of W^T u = e_0.
    const Eigen::MatrixXcd wt = dm.matrix(f).topLeftCorner(ns, ns).transpose();
    const Eigen::VectorXcd u = solve_general(wt, e0, counter, static_cast<long>(f));
    scales.col(static_cast<Eigen::Index>(f)) = u;
    for (std::size_t n = 0; n < dm.n_src(); ++n) {
      const cplx lambda = u(static_cast<Eigen::Index>(n));
      for (cplx& v : y.series(f, n)) v *= lambda;
    }
  }
  return scales;
}

void scale_demixer(ExtendedDemixer& dm, const Eigen::MatrixXcd& scales) {
  for (std::size_t f = 0; f < dm.n_freq(); ++f)
    for (std::size_t n = 0; n < dm.n_src(); ++n)
      dm.matrix(f).row(static_cast<Eigen::Index>(n)) *=
          scales(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(f));
}

// ---------------------------------------------------------------------------
// Driver

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void iterate(Variant variant, SeparationState& s) {
  switch (variant) {
    case Variant::IlrmaIp:
    case Variant::IlrmaTIp:
    case Variant::WpeThenIlrmaIp:
      ilrma_t_ip_iteration(s);
      return;
    case Variant::IlrmaIss:
    case Variant::WpeThenIlrmaIss:
      iss_pass(s);
      source_model_pass(s);
      return;
    case Variant::IlrmaTIssJoint:
      ilrma_t_iss_joint_iteration(s);
      return;
    case Variant::IlrmaTIssSeq:
      ilrma_t_iss_seq_iteration(s);
      return;
    case Variant::Wpe:
      break;
  }
  throw ConfigError("iterate: variant has no separation iteration");
}

RunResult run_wpe_only(const Spectrogram& x, const SeparationConfig& cfg) {
  RunResult res{x, {}, ExtendedDemixer(x.n_freq(), x.n_chan(), cfg.taps), {}, x.n_freq()};
  if (cfg.iterations == 0) {
    res.trace.cost.push_back(0.0);
    res.trace.cumulative_solves.push_back(0);
    res.trace.wall_ms.push_back(0.0);
    return res;
  }
  const auto start = Clock::now();
  const StackedObservation sx(x, cfg.taps);
  SolveCounter counter;
  WpeState state = wpe_init(x, cfg.taps);
  Spectrogram z = x;
  res.trace.cost.push_back(wpe_objective(z, state.variance));
  res.trace.cumulative_solves.push_back(0);
  res.trace.wall_ms.push_back(elapsed_ms(start));
  for (std::size_t it = 1; it <= cfg.iterations; ++it) {
    state.prediction = wpe_filter_update(state, sx, counter);
    z = wpe_dereverb(state.prediction, sx);
    state.variance = wpe_variance_update(z);
    const double c = wpe_objective(z, state.variance);
    if (!std::isfinite(c))
      throw NumericalError("wpe: non-finite objective at iteration " + std::to_string(it), -1,
                           static_cast<long>(it));
    res.trace.cost.push_back(c);
    res.trace.cumulative_solves.push_back(counter.count);
    res.trace.wall_ms.push_back(elapsed_ms(start));
  }
  WarevDecomposition parts;
  const auto m = static_cast<Eigen::Index>(x.n_chan());
  parts.separation.assign(x.n_freq(), Eigen::MatrixXcd::Identity(m, m));
  parts.prediction = state.prediction;
  res.demixer = compose_demixer(parts, cfg.taps);
  res.output = std::move(z);
  return res;
}

}  // namespace

RunResult run(Variant variant, const Spectrogram& x, const SeparationConfig& cfg,
              const IterationObserver& observer) {
  if (x.n_chan() == 0 || x.n_freq() == 0) throw ConfigError("run: empty spectrogram");
  if (cfg.bases == 0) throw ConfigError("run: number of NMF bases must be positive");
  cfg.taps.validate();
  if (variant == Variant::Wpe) return run_wpe_only(x, cfg);

  const auto start = Clock::now();
  CostTrace trace;
  Spectrogram input = x;
  if (variant == Variant::WpeThenIlrmaIp || variant == Variant::WpeThenIlrmaIss) {
    SolveCounter wpe_counter;
    input = wpe_run(x, cfg.taps, std::max<std::size_t>(cfg.wpe_iterations, 1), wpe_counter).output;
    trace.init_solves = wpe_counter.count;
  }
  TapConfig taps = cfg.taps;
  if (!uses_prediction_taps(variant)) taps.taps = 0;

  SeparationState s(input, taps, cfg.bases, cfg.seed);
  trace.cost.push_back(cost(s.demixer, s.outputs, s.variance));
  trace.cumulative_solves.push_back(0);
  trace.wall_ms.push_back(elapsed_ms(start));
  if (observer) observer(0, s);

  for (std::size_t it = 1; it <= cfg.iterations; ++it) {
    iterate(variant, s);
    double c = 0.0;
    try {
      c = cost(s.demixer, s.outputs, s.variance);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " (iteration " + std::to_string(it) + ")",
                           e.freq(), static_cast<long>(it));
    }
    if (!std::isfinite(c))
      throw NumericalError("non-finite cost at iteration " + std::to_string(it), -1,
                           static_cast<long>(it));
    if (cfg.check_structure) s.demixer.check_structure();
    trace.cost.push_back(c);
    trace.cumulative_solves.push_back(s.total_solves());
    trace.wall_ms.push_back(elapsed_ms(start));
    if (observer) observer(it, s);
  }

  RunResult res{std::move(s.outputs), std::move(trace), std::move(s.demixer), {}, x.n_freq()};
  if (cfg.iterations > 0) {
    SolveCounter pb;
    res.scales = projection_back(res.demixer, res.output, pb);
    res.trace.projection_solves = pb.count;
  }
  return res;
}

}  // namespace drbss
