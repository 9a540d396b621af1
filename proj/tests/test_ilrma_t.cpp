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

#include <cmath>

#include <tbb/global_control.h>

#include "doctest.h"
#include "drbss/ilrma_t.hpp"
#include "drbss/wpe.hpp"
#include "helpers.hpp"

using namespace drbss;

namespace {

const Spectrogram& small_mixture() {
  static const Spectrogram x = test::desk_mixture(2, 3, 1.5, 256);
  return x;
}

SeparationConfig short_config(std::size_t iters) {
  SeparationConfig cfg;
  cfg.iterations = iters;
  cfg.taps = {3, 2};
  return cfg;
}

}  // namespace

TEST_CASE("variant names round-trip") {
  for (Variant v : all_variants()) CHECK(parse_variant(to_string(v)) == v);
  CHECK(parse_variant("ILRMA_T_ISS_SEQ") == Variant::IlrmaTIssSeq);
  CHECK(parse_variant("Wpe+Ilrma-Ip") == Variant::WpeThenIlrmaIp);
  CHECK_THROWS_AS(parse_variant("ilrma-t"), ConfigError);
  CHECK_THROWS_AS(parse_variant(""), ConfigError);
  CHECK(all_variants().size() == 8);
}

TEST_CASE("solve counts per iteration and bin") {
  CHECK(solves_per_iteration(Variant::IlrmaTIp, 3) == 6);
  CHECK(solves_per_iteration(Variant::IlrmaIp, 2) == 4);
  CHECK(solves_per_iteration(Variant::IlrmaTIssJoint, 3) == 3);
  CHECK(solves_per_iteration(Variant::IlrmaTIssSeq, 3) == 0);
  CHECK(solves_per_iteration(Variant::IlrmaIss, 3) == 0);
  CHECK(solves_per_iteration(Variant::Wpe, 3) == 1);
  CHECK(uses_prediction_taps(Variant::IlrmaTIssSeq));
  CHECK_FALSE(uses_prediction_taps(Variant::IlrmaIss));
  CHECK_FALSE(uses_prediction_taps(Variant::WpeThenIlrmaIp));
}

TEST_CASE("every variant has a non-increasing trace and follows the solve law") {
  const Spectrogram& x = small_mixture();
  for (Variant v : all_variants()) {
    CAPTURE(to_string(v));
    const RunResult res = run(v, x, short_config(8));
    const auto& c = res.trace.cost;
    REQUIRE(c.size() == 9);
    REQUIRE(res.trace.cumulative_solves.size() == 9);
    CHECK(res.trace.cumulative_solves[0] == 0);
    for (std::size_t i = 1; i < c.size(); ++i) {
      CHECK(c[i] <= c[i - 1] + 1e-8 * std::abs(c[i - 1]));
      const auto step = res.trace.cumulative_solves[i] - res.trace.cumulative_solves[i - 1];
      CHECK(step == solves_per_iteration(v, 2) * x.n_freq());
    }
    // WPE alone has no demixing matrix to project back.
    CHECK(res.trace.projection_solves == (v == Variant::Wpe ? 0 : x.n_freq()));
    if (v == Variant::WpeThenIlrmaIp || v == Variant::WpeThenIlrmaIss)
      CHECK(res.trace.init_solves == 3 * x.n_freq());
    else
      CHECK(res.trace.init_solves == 0);
    for (std::size_t f = 0; f < res.demixer.n_freq(); ++f)
      CHECK(res.demixer.lower_block_intact(f));
    CHECK(res.output.n_chan() == 2);
  }
}

TEST_CASE("zero taps reduce the unified variants to plain separation") {
  const Spectrogram& x = small_mixture();
  SeparationConfig cfg = short_config(5);
  cfg.taps.taps = 0;
  const RunResult ip = run(Variant::IlrmaIp, x, cfg);
  const RunResult tip = run(Variant::IlrmaTIp, x, cfg);
  const RunResult iss = run(Variant::IlrmaIss, x, cfg);
  const RunResult seq = run(Variant::IlrmaTIssSeq, x, cfg);
  const RunResult joint = run(Variant::IlrmaTIssJoint, x, cfg);
  CHECK(ip.trace.cost == tip.trace.cost);
  CHECK(ip.output.raw() == tip.output.raw());
  CHECK(iss.trace.cost == seq.trace.cost);
  CHECK(iss.output.raw() == seq.output.raw());
  CHECK(iss.trace.cost == joint.trace.cost);
  CHECK(joint.trace.cumulative_solves.back() == 0);
}

TEST_CASE("runs are deterministic for a fixed seed") {
  const Spectrogram& x = small_mixture();
  SeparationConfig cfg = short_config(4);
  const RunResult a = run(Variant::IlrmaTIssSeq, x, cfg);
  const RunResult b = run(Variant::IlrmaTIssSeq, x, cfg);
  CHECK(a.output.raw() == b.output.raw());
  cfg.seed = 1;
  const RunResult c = run(Variant::IlrmaTIssSeq, x, cfg);
  CHECK(a.output.raw() != c.output.raw());
}

TEST_CASE("results do not depend on the thread count") {
  const Spectrogram& x = small_mixture();
  const auto once = [&](std::size_t threads) {
    tbb::global_control gc(tbb::global_control::max_allowed_parallelism, threads);
    return run(Variant::IlrmaTIp, x, short_config(4));
  };
  const RunResult a = once(1), b = once(4);
  CHECK(a.output.raw() == b.output.raw());
  CHECK(a.trace.cost == b.trace.cost);
}

TEST_CASE("zero iterations return the input channels untouched") {
  const Spectrogram& x = small_mixture();
  const RunResult res = run(Variant::IlrmaTIp, x, short_config(0));
  CHECK(res.output.raw() == x.raw());
  CHECK(res.scales.size() == 0);
  CHECK(res.trace.cost.size() == 1);
  CHECK(res.trace.projection_solves == 0);
}

TEST_CASE("projected outputs of a plain demixer sum back to microphone 1") {
  // With no taps, y = W x, so sum_n [W^{-1}]_{1n} y_n = x_1 exactly.
  const Spectrogram& x = small_mixture();
  const RunResult res = run(Variant::IlrmaIss, x, short_config(5));
  double worst = 0.0, scale = 0.0;
  for (std::size_t f = 0; f < x.n_freq(); ++f)
    for (std::size_t t = 0; t < x.n_frames(); ++t) {
      const cplx sum = res.output.series(f, 0)[t] + res.output.series(f, 1)[t];
      worst = std::max(worst, std::abs(sum - x.series(f, 0)[t]));
      scale = std::max(scale, std::abs(x.series(f, 0)[t]));
    }
  CHECK(worst <= 1e-9 * scale);
  CHECK(res.scales.rows() == 2);
  CHECK(static_cast<std::size_t>(res.scales.cols()) == x.n_freq());
}

TEST_CASE("scale_demixer makes the demixer reproduce the projected outputs") {
  const Spectrogram& x = small_mixture();
  SeparationConfig cfg = short_config(3);
  RunResult res = run(Variant::IlrmaTIssJoint, x, cfg);
  ExtendedDemixer dm = res.demixer;
  scale_demixer(dm, res.scales);
  const Spectrogram y = demix(dm, StackedObservation(x, cfg.taps));
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < y.raw().size(); ++i) {
    worst = std::max(worst, std::abs(y.raw()[i] - res.output.raw()[i]));
    scale = std::max(scale, std::abs(y.raw()[i]));
  }
  CHECK(worst <= 1e-10 * scale);
}

TEST_CASE("joint dereverberation block matches a WPE filter for one source") {
  // With N = 1, W = 1 and shared variances the JOINT prediction block is
  // the WPE normal-equation solution.
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Spectrogram x = test::random_spectrogram(3, 80, 1, seed);
    const TapConfig taps{3, 1};
    SeparationState s(x, taps, 1, seed);
    s.variance = test::random_positive(1, 3, 80, seed + 9);
    s.refresh_weights();
    WpeState w;
    w.taps = taps;
    w.variance = s.variance;
    SolveCounter counter;
    const auto pred = wpe_filter_update(w, s.observation, counter);
    for (std::size_t f = 0; f < 3; ++f) {
      const Eigen::MatrixXcd v = joint_dereverb_block(s, f);
      CHECK((v - pred[f]).cwiseAbs().maxCoeff() <= 1e-10 * pred[f].cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("sequential dereverberation leaves the outputs consistent with the demixer") {
  SeparationState s(small_mixture(), TapConfig{3, 2}, 2, 4);
  for (int i = 0; i < 3; ++i) ilrma_t_iss_seq_iteration(s);
  const Spectrogram fresh = demix(s.demixer, s.observation);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < fresh.raw().size(); ++i) {
    worst = std::max(worst, std::abs(fresh.raw()[i] - s.outputs.raw()[i]));
    scale = std::max(scale, std::abs(fresh.raw()[i]));
  }
  CHECK(worst <= 1e-9 * scale);
  CHECK(s.total_solves() == 0);
}

TEST_CASE("observer sees every iteration") {
  std::vector<std::size_t> seen;
  run(Variant::IlrmaTIp, small_mixture(), short_config(3),
      [&](std::size_t it, const SeparationState&) { seen.push_back(it); });
  CHECK(seen == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("invalid configurations are rejected") {
  SeparationConfig cfg = short_config(2);
  cfg.bases = 0;
  CHECK_THROWS_AS(run(Variant::IlrmaIp, small_mixture(), cfg), ConfigError);
  cfg = short_config(2);
  cfg.taps.delay = 0;
  CHECK_THROWS_AS(run(Variant::IlrmaTIp, small_mixture(), cfg), ConfigError);
}
