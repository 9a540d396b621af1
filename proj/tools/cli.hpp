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

// Batch front end: configuration files and the simulate / separate / eval /
// bench commands. Kept in a library so the acceptance suite can drive the
// same code paths as the executable.

#ifndef DRBSS_TOOLS_CLI_HPP_
#define DRBSS_TOOLS_CLI_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "drbss/ilrma_t.hpp"
#include "drbss/metrics.hpp"
#include "drbss/sim.hpp"

namespace drbss::cli {

namespace fs = std::filesystem;

/// Flat `key = value` document; `#` starts a comment. Order is preserved.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

KeyValues parse_key_values(std::string_view text, const std::string& origin = "config");
KeyValues load_key_values(const fs::path& path);
std::string serialize(const KeyValues& kv);

enum class ReferenceMode { Direct, Anechoic };
std::string_view to_string(ReferenceMode m);
ReferenceMode parse_reference_mode(std::string_view s);

struct RunConfig {
  Variant variant = Variant::IlrmaTIssSeq;
  std::size_t iterations = 100;
  std::size_t taps = 5;
  std::size_t delay = 2;
  std::size_t bases = 2;
  std::size_t frame = 1024;
  std::size_t hop = 256;
  std::uint64_t seed = 0;
  std::size_t wpe_init_iters = 3;
  ReferenceMode reference = ReferenceMode::Direct;
  double sample_rate = 16000.0;

  /// Applies the recognised keys; unknown keys are a ConfigError.
  static RunConfig from_key_values(const KeyValues& kv);
  KeyValues to_key_values() const;
  void validate() const;

  StftConfig stft() const;
  SeparationConfig separation() const;

  bool operator==(const RunConfig&) const = default;
};

struct SimConfig {
  std::size_t sources = 2;
  double rt60 = 0.3;
  double snr = std::numeric_limits<double>::infinity();
  double drr_db = 0.0;
  std::size_t max_delay = 8;
  double duration = 6.0;  // seconds
  double fs = 16000.0;
  std::uint64_t seed = 0;

  static SimConfig from_key_values(const KeyValues& kv);
  KeyValues to_key_values() const;
  RoomConfig room() const;

  bool operator==(const SimConfig&) const = default;
};

struct BenchConfig {
  std::vector<Variant> variants;
  std::vector<std::size_t> sources{2};
  std::vector<std::uint64_t> seeds{0};
  std::size_t eval_every = 10;
  RunConfig run;
  SimConfig sim;

  /// Keys: variants, sources, seeds (comma lists), eval_every, every
  /// RunConfig key except variant, and sim keys prefixed with `sim.`.
  static BenchConfig from_key_values(const KeyValues& kv);
};

// Commands. All throw drbss::Error subclasses; exit_code() maps them.

void cmd_simulate(const SimConfig& cfg, const std::vector<fs::path>& source_wavs,
                  const fs::path& out_dir);

void cmd_separate(const fs::path& mixture_wav, const RunConfig& cfg, const fs::path& out_dir);

/// `mixture_wav` may be empty, in which case <refs_dir>/../mixture.wav is used.
void cmd_eval(const fs::path& refs_dir, const fs::path& estimates_dir,
              const fs::path& mixture_wav, ReferenceMode mode, const fs::path& out_dir);

void cmd_bench(const BenchConfig& cfg, const fs::path& out_dir);

// One benchmark cell, shared with the acceptance suite.

struct CurvePoint {
  std::size_t iteration = 0;
  double cost = 0.0;
  std::uint64_t cumulative_solves = 0;
  double wall_ms = 0.0;
  bool evaluated = false;
  double delta_si_sdr = 0.0;
  double delta_si_sir = 0.0;
};

struct CellResult {
  std::vector<CurvePoint> curve;
  EvalReport final_report;
  double wall_ms = 0.0;
};

/// Simulates a mixture from (sim, n_src, seed), runs `variant` and scores
/// the projected-back estimates against the chosen references every
/// `eval_every` iterations (0 = final only) and at the end.
CellResult run_cell(Variant variant, std::size_t n_src, std::uint64_t seed,
                    const BenchConfig& cfg);

/// Runs `fn`, printing any error to stderr; returns the process exit code
/// (0 ok, 2 config, 3 numerical, 4 I/O).
int exit_code(const std::function<void()>& fn);

}  // namespace drbss::cli

#endif  // DRBSS_TOOLS_CLI_HPP_
