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

#include <algorithm>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>

#include <tbb/global_control.h>

#include "CLI11.hpp"
#include "cli.hpp"
#include "drbss/kernels.hpp"

namespace {

using namespace drbss;
using namespace drbss::cli;

// Command-line flags layered over an optional config file.
struct Overrides {
  std::map<std::string, std::string> values;

  void add(CLI::App* app, const std::string& flag, const std::string& key,
           const std::string& help) {
    app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { values[key] = v; }, help);
  }

  KeyValues merge(const std::string& config_path) const {
    KeyValues kv = config_path.empty() ? KeyValues{} : load_key_values(config_path);
    for (const auto& [k, v] : values) {
      auto it = std::find_if(kv.begin(), kv.end(), [&](const auto& p) { return p.first == k; });
      if (it != kv.end())
        it->second = v;
      else
        kv.emplace_back(k, v);
    }
    return kv;
  }
};

std::size_t thread_count(std::size_t flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("DRBSS_NUM_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<std::size_t>(n);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"drbss: joint dereverberation and blind source separation"};
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads,
                 "worker threads (default: DRBSS_NUM_THREADS or all cores)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate a synthetic reverberant mixture");
  std::string sim_config, sim_out;
  std::vector<std::string> sim_sources;
  Overrides sim_over;
  sim->add_option("--config", sim_config, "key = value file");
  sim->add_option("--out", sim_out, "output directory")->required();
  sim->add_option("--source", sim_sources, "mono source WAV (repeat per source)");
  sim_over.add(sim, "--sources", "sources", "number of sources / microphones");
  sim_over.add(sim, "--rt60", "rt60", "reverberation time in seconds");
  sim_over.add(sim, "--snr", "snr", "linear SNR N / sigma^2 (inf = no noise)");
  sim_over.add(sim, "--drr-db", "drr_db", "direct-to-reverberant ratio in dB");
  sim_over.add(sim, "--max-delay", "max_delay", "largest direct-path delay in samples");
  sim_over.add(sim, "--duration", "duration", "builtin source length in seconds");
  sim_over.add(sim, "--fs", "fs", "sample rate of builtin sources");
  sim_over.add(sim, "--seed", "seed", "random seed");

  // separate
  auto* sep = app.add_subcommand("separate", "dereverberate and separate a mixture");
  std::string sep_mixture, sep_config, sep_out;
  Overrides sep_over;
  sep->add_option("mixture", sep_mixture, "multichannel mixture WAV")->required();
  sep->add_option("--config", sep_config, "key = value file");
  sep->add_option("--out", sep_out, "output directory")->required();
  sep_over.add(sep, "--variant", "variant", "algorithm, e.g. ilrma-t-iss-seq");
  sep_over.add(sep, "--iterations", "iterations", "outer iterations");
  sep_over.add(sep, "--taps", "taps", "prediction taps L");
  sep_over.add(sep, "--delay", "delay", "prediction delay in frames");
  sep_over.add(sep, "--bases", "bases", "NMF bases per source");
  sep_over.add(sep, "--frame", "frame", "STFT frame length");
  sep_over.add(sep, "--hop", "hop", "STFT hop");
  sep_over.add(sep, "--seed", "seed", "NMF initialisation seed");
  sep_over.add(sep, "--wpe-init-iters", "wpe_init_iters", "WPE iterations for wpe+ variants");
  sep_over.add(sep, "--sample-rate", "sample_rate", "expected mixture sample rate");

  // eval
  auto* ev = app.add_subcommand("eval", "score estimates against references");
  std::string ev_refs, ev_est, ev_mix, ev_out, ev_mode = "direct";
  ev->add_option("--refs", ev_refs, "directory with src<n>_direct.wav / src<n>_anechoic.wav")
      ->required();
  ev->add_option("--estimates", ev_est, "directory with est_<n>.wav")->required();
  ev->add_option("--mixture", ev_mix, "mixture WAV (default: <refs>/../mixture.wav)");
  ev->add_option("--mode", ev_mode, "reference: direct or anechoic");
  ev->add_option("--out", ev_out, "output directory")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "run a variants x sources x seeds matrix");
  std::string bench_matrix, bench_out;
  bench->add_option("matrix", bench_matrix, "matrix file (key = value)")->required();
  bench->add_option("--out", bench_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  std::unique_ptr<tbb::global_control> limit;
  if (const std::size_t n = thread_count(threads); n > 0)
    limit = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism, n);

  return exit_code([&] {
    if (sim->parsed()) {
      std::vector<fs::path> paths(sim_sources.begin(), sim_sources.end());
      cmd_simulate(SimConfig::from_key_values(sim_over.merge(sim_config)), paths, sim_out);
    } else if (sep->parsed()) {
      cmd_separate(sep_mixture, RunConfig::from_key_values(sep_over.merge(sep_config)), sep_out);
    } else if (ev->parsed()) {
      cmd_eval(ev_refs, ev_est, ev_mix, parse_reference_mode(ev_mode), ev_out);
    } else if (bench->parsed()) {
      cmd_bench(BenchConfig::from_key_values(load_key_values(bench_matrix)), bench_out);
    }
  });
}
