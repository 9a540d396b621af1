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

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "cli.hpp"
#include "drbss/kernels.hpp"
#include "drbss/wav.hpp"
#include "json.hpp"

namespace drbss::cli {

namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
  if (!f) throw IoError("write failed: " + path.string());
}

// FNV-1a over the raw sample bytes.
std::string digest(const std::vector<double>& x) {
  std::uint64_t h = 14695981039346656037ull;
  for (double v : x) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof v);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ull;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json config_json(const KeyValues& kv) {
  json j = json::object();
  for (const auto& [k, v] : kv) j[k] = v;
  return j;
}

std::string indexed(std::string_view stem, std::size_t n, std::string_view suffix) {
  return std::string(stem) + std::to_string(n + 1) + std::string(suffix);
}

Signal read_indexed(const fs::path& dir, std::string_view stem, std::string_view suffix,
                    double& fs_out) {
  Signal out;
  fs_out = 0.0;
  for (std::size_t n = 0;; ++n) {
    const fs::path p = dir / indexed(stem, n, suffix);
    if (!fs::exists(p)) break;
    WavData w = read_wav(p);
    if (w.channels.size() != 1) throw ConfigError(p.string() + ": expected a mono file");
    if (fs_out != 0.0 && w.sample_rate != fs_out)
      throw ConfigError(p.string() + ": sample rate differs from the other files");
    fs_out = w.sample_rate;
    out.push_back(std::move(w.channels[0]));
  }
  if (out.empty())
    throw IoError("no " + std::string(stem) + "<n>" + std::string(suffix) + " files in " +
                  dir.string());
  return out;
}

json report_json(const EvalReport& r) {
  json j;
  j["permutation"] = r.permutation;
  json per = json::array();
  for (std::size_t n = 0; n < r.si_sdr.size(); ++n)
    per.push_back({{"source", n + 1},
                   {"estimate", r.permutation[n] + 1},
                   {"si_sdr", r.si_sdr[n]},
                   {"si_sir", r.si_sir[n]},
                   {"cd", r.cd[n]},
                   {"mixture_si_sdr", r.mix_si_sdr[n]},
                   {"mixture_si_sir", r.mix_si_sir[n]},
                   {"mixture_cd", r.mix_cd[n]},
                   {"delta_si_sdr", r.delta_si_sdr[n]},
                   {"delta_si_sir", r.delta_si_sir[n]}});
  j["sources"] = per;
  j["mean"] = {{"si_sdr", r.mean_si_sdr()},
               {"si_sir", r.mean_si_sir()},
               {"cd", r.mean_cd()},
               {"delta_si_sdr", r.mean_delta_si_sdr()},
               {"delta_si_sir", r.mean_delta_si_sir()}};
  return j;
}

std::string report_csv(const EvalReport& r) {
  std::string out = "source,estimate,si_sdr,si_sir,cd,delta_si_sdr,delta_si_sir\n";
  for (std::size_t n = 0; n < r.si_sdr.size(); ++n)
    out += std::to_string(n + 1) + "," + std::to_string(r.permutation[n] + 1) + "," +
           num(r.si_sdr[n]) + "," + num(r.si_sir[n]) + "," + num(r.cd[n]) + "," +
           num(r.delta_si_sdr[n]) + "," + num(r.delta_si_sir[n]) + "\n";
  out += "mean,," + num(r.mean_si_sdr()) + "," + num(r.mean_si_sir()) + "," + num(r.mean_cd()) +
         "," + num(r.mean_delta_si_sdr()) + "," + num(r.mean_delta_si_sir()) + "\n";
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

void cmd_simulate(const SimConfig& cfg_in, const std::vector<fs::path>& source_wavs,
                  const fs::path& out_dir) {
  SimConfig cfg = cfg_in;
  Signal sources;
  if (!source_wavs.empty()) {
    if (source_wavs.size() != cfg.sources)
      throw ConfigError("simulate: " + std::to_string(source_wavs.size()) +
                        " source files for sources = " + std::to_string(cfg.sources));
    double rate = 0.0;
    for (const auto& p : source_wavs) {
      WavData w = read_wav(p);
      if (w.channels.size() != 1)
        throw ConfigError(p.string() + ": source files must be mono, found " +
                          std::to_string(w.channels.size()) + " channels");
      if (rate != 0.0 && w.sample_rate != rate)
        throw ConfigError(p.string() + ": sample rate differs from the other sources");
      rate = w.sample_rate;
      sources.push_back(std::move(w.channels[0]));
    }
    cfg.fs = rate;
    std::size_t len = sources.front().size();
    for (const auto& s : sources) len = std::min(len, s.size());
    for (auto& s : sources) s.resize(len);
  } else {
    const auto len = static_cast<std::size_t>(std::lround(cfg.duration * cfg.fs));
    sources = builtin_sources(cfg.sources, len, cfg.fs, cfg.seed);
  }

  const RoomConfig room = cfg.room();
  const Mixture m = mix(sources, room);
  ensure_dir(out_dir / "refs");
  write_wav(out_dir / "mixture.wav", m.mixture, cfg.fs);
  json rirs = json::array();
  for (std::size_t n = 0; n < cfg.sources; ++n) {
    write_wav(out_dir / "refs" / indexed("src", n, "_direct.wav"), {m.direct[n][0]}, cfg.fs);
    write_wav(out_dir / "refs" / indexed("src", n, "_anechoic.wav"), {m.anechoic[n]}, cfg.fs);
    write_wav(out_dir / "refs" / indexed("src", n, "_image.wav"), {m.images[n][0]}, cfg.fs);
    for (std::size_t mic = 0; mic < cfg.sources; ++mic)
      rirs.push_back({{"source", n + 1},
                      {"mic", mic + 1},
                      {"length", m.rirs[n][mic].size()},
                      {"direct_delay", room.direct_delay(n, mic)},
                      {"direct_gain", room.direct_gain(n, mic)},
                      {"digest", digest(m.rirs[n][mic])}});
  }
  json meta;
  meta["seed"] = cfg.seed;
  meta["sources"] = cfg.sources;
  meta["fs"] = cfg.fs;
  meta["samples"] = m.mixture.front().size();
  meta["rt60"] = cfg.rt60;
  meta["drr_db"] = cfg.drr_db;
  meta["snr"] = std::isinf(cfg.snr) ? json("inf") : json(cfg.snr);
  meta["sigma2"] = m.sigma2;
  meta["builtin_sources"] = source_wavs.empty();
  meta["rirs"] = rirs;
  write_text(out_dir / "meta.json", meta.dump(2) + "\n");
}

void cmd_separate(const fs::path& mixture_wav, const RunConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  const WavData wav = read_wav(mixture_wav);
  if (wav.sample_rate != cfg.sample_rate)
    throw ConfigError("separate: unsupported sample rate " + num(wav.sample_rate) +
                      " Hz (configured " + num(cfg.sample_rate) + " Hz; resampling is not done)");
  const std::size_t n_chan = wav.channels.size();
  const Spectrogram x = analyze(wav.channels, cfg.stft());
  const RunResult res = run(cfg.variant, x, cfg.separation());
  const Signal y = synthesize(res.output);

  ensure_dir(out_dir / "estimates");
  for (std::size_t n = 0; n < y.size(); ++n)
    write_wav(out_dir / "estimates" / indexed("est_", n, ".wav"), {y[n]}, wav.sample_rate);

  const CostTrace& tr = res.trace;
  std::string csv = "iteration,cost,cumulative_solves,wall_ms\n";
  for (std::size_t i = 0; i < tr.cost.size(); ++i)
    csv += std::to_string(i) + "," + num(tr.cost[i]) + "," +
           std::to_string(tr.cumulative_solves[i]) + "," + num(tr.wall_ms[i]) + "\n";
  write_text(out_dir / "trace.csv", csv);

  const std::uint64_t per_bin = solves_per_iteration(cfg.variant, n_chan);
  bool law_ok = true, monotone = true;
  for (std::size_t i = 1; i < tr.cost.size(); ++i) {
    law_ok &= tr.cumulative_solves[i] - tr.cumulative_solves[i - 1] == per_bin * x.n_freq();
    monotone &= tr.cost[i] <= tr.cost[i - 1] + 1e-8 * std::abs(tr.cost[i - 1]);
  }
  json rep;
  rep["config"] = config_json(cfg.to_key_values());
  rep["mixture"] = mixture_wav.string();
  rep["channels"] = n_chan;
  rep["freq_bins"] = x.n_freq();
  rep["frames"] = x.n_frames();
  rep["kernels"] = std::string(kernels::active_name());
  rep["initial_cost"] = tr.cost.front();
  rep["final_cost"] = tr.cost.back();
  rep["cost_non_increasing"] = monotone;
  rep["solves"] = {{"iterations", tr.cumulative_solves.back()},
                   {"expected_per_iteration_per_bin", per_bin},
                   {"law_holds", law_ok},
                   {"wpe_init", tr.init_solves},
                   {"projection_back", tr.projection_solves}};
  write_text(out_dir / "report.json", rep.dump(2) + "\n");
}

void cmd_eval(const fs::path& refs_dir, const fs::path& estimates_dir,
              const fs::path& mixture_wav, ReferenceMode mode, const fs::path& out_dir) {
  double fs_ref = 0.0, fs_est = 0.0;
  const std::string suffix = mode == ReferenceMode::Direct ? "_direct.wav" : "_anechoic.wav";
  const Signal refs = read_indexed(refs_dir, "src", suffix, fs_ref);
  const Signal ests = read_indexed(estimates_dir, "est_", ".wav", fs_est);
  const fs::path mix_path =
      mixture_wav.empty() ? refs_dir.parent_path() / "mixture.wav" : mixture_wav;
  const WavData mix = read_wav(mix_path);
  if (refs.size() != ests.size())
    throw ConfigError("eval: " + std::to_string(refs.size()) + " references but " +
                      std::to_string(ests.size()) + " estimates");
  if (fs_ref != fs_est || fs_ref != mix.sample_rate)
    throw ConfigError("eval: sample rates of references, estimates and mixture differ");
  for (const auto& e : ests)
    if (e.size() != refs.front().size())
      throw ConfigError("eval: length mismatch between references and estimates");
  for (const auto& r : refs)
    if (r.size() != refs.front().size()) throw ConfigError("eval: references differ in length");
  if (mix.channels.front().size() != refs.front().size())
    throw ConfigError("eval: length mismatch between references and mixture");

  const EvalReport rep = evaluate(refs, ests, mix.channels.front(), fs_ref);
  ensure_dir(out_dir);
  json j = report_json(rep);
  j["reference"] = std::string(to_string(mode));
  write_text(out_dir / "metrics.json", j.dump(2) + "\n");
  write_text(out_dir / "metrics.csv", report_csv(rep));
}

// ---------------------------------------------------------------------------

CellResult run_cell(Variant variant, std::size_t n_src, std::uint64_t seed,
                    const BenchConfig& cfg) {
  SimConfig sc = cfg.sim;
  sc.sources = n_src;
  sc.seed = seed;
  const auto len = static_cast<std::size_t>(std::lround(sc.duration * sc.fs));
  const Mixture m = mix(builtin_sources(n_src, len, sc.fs, seed), sc.room());
  Signal refs(n_src);
  for (std::size_t n = 0; n < n_src; ++n)
    refs[n] = cfg.run.reference == ReferenceMode::Direct ? m.direct[n][0] : m.anechoic[n];

  RunConfig rc = cfg.run;
  rc.variant = variant;
  rc.seed = seed;
  rc.sample_rate = sc.fs;
  const Spectrogram x = analyze(m.mixture, rc.stft());

  std::map<std::size_t, EvalReport> evals;
  IterationObserver observer;
  if (cfg.eval_every > 0) {
    observer = [&](std::size_t it, const SeparationState& s) {
      if (it % cfg.eval_every != 0) return;
      Spectrogram y = s.outputs;
      if (it > 0) {
        SolveCounter scratch;
        projection_back(s.demixer, y, scratch);
      }
      evals.emplace(it, evaluate(refs, synthesize(y), m.mixture.front(), sc.fs));
    };
  }
  CellResult cell;
  const RunResult res = run(variant, x, rc.separation(), observer);
  cell.final_report = evaluate(refs, synthesize(res.output), m.mixture.front(), sc.fs);
  const CostTrace& tr = res.trace;
  cell.wall_ms = tr.wall_ms.back();
  for (std::size_t i = 0; i < tr.cost.size(); ++i) {
    CurvePoint p{i, tr.cost[i], tr.cumulative_solves[i], tr.wall_ms[i]};
    const EvalReport* r = nullptr;
    if (i + 1 == tr.cost.size())
      r = &cell.final_report;
    else if (auto it = evals.find(i); it != evals.end())
      r = &it->second;
    if (r) {
      p.evaluated = true;
      p.delta_si_sdr = r->mean_delta_si_sdr();
      p.delta_si_sir = r->mean_delta_si_sir();
    }
    cell.curve.push_back(p);
  }
  return cell;
}

void cmd_bench(const BenchConfig& cfg, const fs::path& out_dir) {
  ensure_dir(out_dir);
  std::string curves =
      "variant,sources,seed,iteration,cost,cumulative_solves,delta_si_sdr,delta_si_sir,status,"
      "wall_ms\n";
  std::string summary =
      "variant,sources,cells,failed,mean_delta_si_sdr,mean_delta_si_sir,mean_cd,mean_wall_ms\n";
  for (Variant v : cfg.variants) {
    for (std::size_t n : cfg.sources) {
      double sdr = 0.0, sir = 0.0, cd = 0.0, wall = 0.0;
      std::size_t ok = 0, failed = 0;
      for (std::uint64_t seed : cfg.seeds) {
        const std::string key =
            std::string(to_string(v)) + "," + std::to_string(n) + "," + std::to_string(seed) + ",";
        try {
          const CellResult cell = run_cell(v, n, seed, cfg);
          for (const auto& p : cell.curve)
            curves += key + std::to_string(p.iteration) + "," + num(p.cost) + "," +
                      std::to_string(p.cumulative_solves) + "," +
                      (p.evaluated ? num(p.delta_si_sdr) : "") + "," +
                      (p.evaluated ? num(p.delta_si_sir) : "") + ",ok," + num(p.wall_ms) + "\n";
          sdr += cell.final_report.mean_delta_si_sdr();
          sir += cell.final_report.mean_delta_si_sir();
          cd += cell.final_report.mean_cd();
          wall += cell.wall_ms;
          ++ok;
        } catch (const Error& e) {
          std::string msg = e.what();
          for (char& c : msg)
            if (c == ',' || c == '\n') c = ';';
          curves += key + ",,,,,error: " + msg + ",\n";
          ++failed;
        }
        std::cerr << "bench: " << to_string(v) << " N=" << n << " seed=" << seed
                  << " done\n";
      }
      const double k = ok ? static_cast<double>(ok) : 1.0;
      summary += std::string(to_string(v)) + "," + std::to_string(n) + "," +
                 std::to_string(ok + failed) + "," + std::to_string(failed) + "," +
                 (ok ? num(sdr / k) : "") + "," + (ok ? num(sir / k) : "") + "," +
                 (ok ? num(cd / k) : "") + "," + (ok ? num(wall / k) : "") + "\n";
    }
  }
  write_text(out_dir / "curves.csv", curves);
  write_text(out_dir / "summary.csv", summary);
}

int exit_code(const std::function<void()>& fn) {
  try {
    fn();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what();
    if (e.iteration() >= 0) std::cerr << " [iteration " << e.iteration() << "]";
    if (e.freq() >= 0) std::cerr << " [frequency bin " << e.freq() << "]";
    std::cerr << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 4;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace drbss::cli
