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
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cli.hpp"

namespace drbss::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_uint(const std::string& key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" +
                      std::string(v) + "'");
  return out;
}

double parse_double(const std::string& key, std::string_view v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || std::isnan(out))
    throw ConfigError("config: '" + key + "' expects a number, got '" + std::string(v) + "'");
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  while (!v.empty()) {
    const auto c = v.find(',');
    const auto item = trim(v.substr(0, c));
    if (!item.empty()) out.push_back(item);
    if (c == std::string_view::npos) break;
    v.remove_prefix(c + 1);
  }
  return out;
}

// Applies `kv` through the per-key setters; anything unmatched is rejected.
using Setter = std::function<void(const std::string&, std::string_view)>;

void apply(const KeyValues& kv, const std::map<std::string, Setter>& setters,
           const char* what) {
  for (const auto& [k, v] : kv) {
    const auto it = setters.find(k);
    if (it == setters.end()) throw ConfigError(std::string(what) + ": unknown key '" + k + "'");
    it->second(k, v);
  }
}

template <class T>
Setter uint_setter(T& field) {
  return [&field](const std::string& k, std::string_view v) {
    field = static_cast<T>(parse_uint(k, v));
  };
}

Setter double_setter(double& field) {
  return [&field](const std::string& k, std::string_view v) { field = parse_double(k, v); };
}

std::map<std::string, Setter> run_setters(RunConfig& c, bool with_variant) {
  std::map<std::string, Setter> s{
      {"iterations", uint_setter(c.iterations)},
      {"taps", uint_setter(c.taps)},
      {"delay", uint_setter(c.delay)},
      {"bases", uint_setter(c.bases)},
      {"frame", uint_setter(c.frame)},
      {"hop", uint_setter(c.hop)},
      {"seed", uint_setter(c.seed)},
      {"wpe_init_iters", uint_setter(c.wpe_init_iters)},
      {"reference", [&c](const std::string&, std::string_view v) {
         c.reference = parse_reference_mode(v);
       }},
      {"sample_rate", double_setter(c.sample_rate)},
  };
  if (with_variant)
    s["variant"] = [&c](const std::string&, std::string_view v) { c.variant = parse_variant(v); };
  return s;
}

std::map<std::string, Setter> sim_setters(SimConfig& c, const std::string& prefix) {
  return {
      {prefix + "sources", uint_setter(c.sources)},
      {prefix + "rt60", double_setter(c.rt60)},
      {prefix + "snr", double_setter(c.snr)},
      {prefix + "drr_db", double_setter(c.drr_db)},
      {prefix + "max_delay", uint_setter(c.max_delay)},
      {prefix + "duration", double_setter(c.duration)},
      {prefix + "fs", double_setter(c.fs)},
      {prefix + "seed", uint_setter(c.seed)},
  };
}

}  // namespace

KeyValues parse_key_values(std::string_view text, const std::string& origin) {
  KeyValues out;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(line_no);
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
    std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (!seen.insert(key).second) throw ConfigError(where + ": duplicate key '" + key + "'");
    out.emplace_back(std::move(key), value);
  }
  return out;
}

KeyValues load_key_values(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str(), path.string());
}

std::string serialize(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::string_view to_string(ReferenceMode m) {
  return m == ReferenceMode::Direct ? "direct" : "anechoic";
}

ReferenceMode parse_reference_mode(std::string_view s) {
  if (s == "direct" || s == "direct-path") return ReferenceMode::Direct;
  if (s == "anechoic") return ReferenceMode::Anechoic;
  throw ConfigError("reference must be 'direct' or 'anechoic', got '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------

RunConfig RunConfig::from_key_values(const KeyValues& kv) {
  RunConfig c;
  apply(kv, run_setters(c, true), "run config");
  c.validate();
  return c;
}

KeyValues RunConfig::to_key_values() const {
  return {
      {"variant", std::string(drbss::to_string(variant))},
      {"iterations", std::to_string(iterations)},
      {"taps", std::to_string(taps)},
      {"delay", std::to_string(delay)},
      {"bases", std::to_string(bases)},
      {"frame", std::to_string(frame)},
      {"hop", std::to_string(hop)},
      {"seed", std::to_string(seed)},
      {"wpe_init_iters", std::to_string(wpe_init_iters)},
      {"reference", std::string(to_string(reference))},
      {"sample_rate", format_double(sample_rate)},
  };
}

void RunConfig::validate() const {
  stft().validate();
  TapConfig{taps, delay}.validate();
  if (bases == 0) throw ConfigError("bases must be positive");
  if ((variant == Variant::Wpe || variant == Variant::WpeThenIlrmaIp ||
       variant == Variant::WpeThenIlrmaIss) &&
      taps == 0)
    throw ConfigError("WPE variants need taps >= 1");
}

StftConfig RunConfig::stft() const {
  StftConfig s;
  s.frame_len = frame;
  s.hop = hop;
  s.sample_rate = sample_rate;
  return s;
}

SeparationConfig RunConfig::separation() const {
  SeparationConfig s;
  s.iterations = iterations;
  s.taps = TapConfig{taps, delay};
  s.bases = bases;
  s.seed = seed;
  s.wpe_iterations = wpe_init_iters;
  return s;
}

SimConfig SimConfig::from_key_values(const KeyValues& kv) {
  SimConfig c;
  apply(kv, sim_setters(c, ""), "sim config");
  c.room().validate();
  if (!(c.duration > 0.0)) throw ConfigError("sim config: duration must be positive");
  return c;
}

KeyValues SimConfig::to_key_values() const {
  return {
      {"sources", std::to_string(sources)},   {"rt60", format_double(rt60)},
      {"snr", format_double(snr)},            {"drr_db", format_double(drr_db)},
      {"max_delay", std::to_string(max_delay)}, {"duration", format_double(duration)},
      {"fs", format_double(fs)},              {"seed", std::to_string(seed)},
  };
}

RoomConfig SimConfig::room() const {
  RoomConfig r;
  r.n_src = sources;
  r.rt60 = rt60;
  r.fs = fs;
  r.snr = snr;
  r.drr_db = drr_db;
  r.max_delay = max_delay;
  r.seed = seed;
  return r;
}

BenchConfig BenchConfig::from_key_values(const KeyValues& kv) {
  BenchConfig c;
  c.variants.clear();
  auto setters = run_setters(c.run, false);
  for (auto& [k, s] : sim_setters(c.sim, "sim.")) setters[k] = std::move(s);
  setters["variants"] = [&c](const std::string&, std::string_view v) {
    for (auto item : split_list(v)) c.variants.push_back(parse_variant(item));
  };
  setters["sources"] = [&c](const std::string& k, std::string_view v) {
    c.sources.clear();
    for (auto item : split_list(v)) c.sources.push_back(parse_uint(k, item));
  };
  setters["seeds"] = [&c](const std::string& k, std::string_view v) {
    c.seeds.clear();
    for (auto item : split_list(v)) c.seeds.push_back(parse_uint(k, item));
  };
  setters["eval_every"] = uint_setter(c.eval_every);
  apply(kv, setters, "bench config");
  if (c.variants.empty()) throw ConfigError("bench config: 'variants' is required");
  if (c.sources.empty() || c.seeds.empty())
    throw ConfigError("bench config: 'sources' and 'seeds' must be non-empty");
  for (std::size_t n : c.sources)
    if (n < 1 || n > 4) throw ConfigError("bench config: sources must be in 1..4");
  c.run.sample_rate = c.sim.fs;
  for (Variant v : c.variants) {
    c.run.variant = v;
    c.run.validate();
  }
  return c;
}

}  // namespace drbss::cli
