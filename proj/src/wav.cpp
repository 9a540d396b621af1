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

#include "drbss/wav.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "drbss/common.hpp"

namespace drbss {

static_assert(std::endian::native == std::endian::little, "WAV I/O assumes a little-endian host");

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <class T>
T load(const std::vector<char>& buf, std::size_t pos) {
  T v;
  std::memcpy(&v, buf.data() + pos, sizeof(T));
  return v;
}

template <class T>
void store(std::string& out, T v) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  out.append(bytes, sizeof(T));
}

double decode(const char* p, std::uint16_t format, std::uint16_t bits) {
  if (format == kFormatFloat) {
    if (bits == 32) {
      float f;
      std::memcpy(&f, p, 4);
      return f;
    }
    double d;
    std::memcpy(&d, p, 8);
    return d;
  }
  switch (bits) {
    case 16: {
      std::int16_t v;
      std::memcpy(&v, p, 2);
      return v / 32768.0;
    }
    case 24: {
      const auto b0 = static_cast<std::uint8_t>(p[0]), b1 = static_cast<std::uint8_t>(p[1]),
                 b2 = static_cast<std::uint8_t>(p[2]);
      std::int32_t v = static_cast<std::int32_t>((b2 << 24) | (b1 << 16) | (b0 << 8)) >> 8;
      return v / 8388608.0;
    }
    default: {
      std::int32_t v;
      std::memcpy(&v, p, 4);
      return v / 2147483648.0;
    }
  }
}

}  // namespace

WavData read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string name = path.string();
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
    throw IoError(name + ": not a RIFF/WAVE file");

  std::uint16_t format = 0, n_chan = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::size_t data_pos = 0, data_len = 0;
  for (std::size_t pos = 12; pos + 8 <= buf.size();) {
    const std::uint32_t len = load<std::uint32_t>(buf, pos + 4);
    const std::size_t body = pos + 8;
    if (body + len > buf.size() && std::memcmp(buf.data() + pos, "data", 4) != 0)
      throw IoError(name + ": truncated chunk");
    if (std::memcmp(buf.data() + pos, "fmt ", 4) == 0) {
      if (len < 16) throw IoError(name + ": short fmt chunk");
      format = load<std::uint16_t>(buf, body);
      n_chan = load<std::uint16_t>(buf, body + 2);
      rate = load<std::uint32_t>(buf, body + 4);
      bits = load<std::uint16_t>(buf, body + 14);
      if (format == kFormatExtensible) {
        if (len < 26) throw IoError(name + ": short extensible fmt chunk");
        format = load<std::uint16_t>(buf, body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(buf.data() + pos, "data", 4) == 0) {
      data_pos = body;
      data_len = std::min<std::size_t>(len, buf.size() - body);
      break;
    }
    pos = body + len + (len & 1);
  }
  if (!have_fmt) throw IoError(name + ": missing fmt chunk");
  if (data_pos == 0) throw IoError(name + ": missing data chunk");
  const bool supported = (format == kFormatFloat && (bits == 32 || bits == 64)) ||
                         (format == kFormatPcm && (bits == 16 || bits == 24 || bits == 32));
  if (!supported || n_chan == 0)
    throw IoError(name + ": unsupported sample format (" + std::to_string(format) + ", " +
                  std::to_string(bits) + " bit)");

  const std::size_t width = bits / 8;
  const std::size_t n_samples = data_len / (width * n_chan);
  WavData out;
  out.sample_rate = rate;
  out.channels.assign(n_chan, std::vector<double>(n_samples));
  for (std::size_t t = 0; t < n_samples; ++t)
    for (std::size_t m = 0; m < n_chan; ++m)
      out.channels[m][t] = decode(buf.data() + data_pos + (t * n_chan + m) * width, format, bits);
  return out;
}

void write_wav(const std::filesystem::path& path, const Signal& channels, double sample_rate) {
  if (channels.empty()) throw ConfigError("write_wav: no channels");
  const std::size_t n = channels.front().size();
  for (const auto& c : channels)
    if (c.size() != n) throw ConfigError("write_wav: channels differ in length");
  if (!(sample_rate > 0.0) || sample_rate != std::floor(sample_rate))
    throw ConfigError("write_wav: sample rate must be a positive integer");

  const auto n_chan = static_cast<std::uint16_t>(channels.size());
  const auto rate = static_cast<std::uint32_t>(sample_rate);
  const std::uint64_t data_len = static_cast<std::uint64_t>(n) * n_chan * 4;
  if (data_len > 0xFFFFFFFFull - 36) throw IoError("write_wav: file too large for RIFF");

  std::string out;
  out.reserve(44 + data_len);
  out += "RIFF";
  store<std::uint32_t>(out, static_cast<std::uint32_t>(36 + data_len));
  out += "WAVEfmt ";
  store<std::uint32_t>(out, 16);
  store<std::uint16_t>(out, kFormatFloat);
  store<std::uint16_t>(out, n_chan);
  store<std::uint32_t>(out, rate);
  store<std::uint32_t>(out, rate * n_chan * 4);
  store<std::uint16_t>(out, static_cast<std::uint16_t>(n_chan * 4));
  store<std::uint16_t>(out, 32);
  out += "data";
  store<std::uint32_t>(out, static_cast<std::uint32_t>(data_len));
  for (std::size_t t = 0; t < n; ++t)
    for (const auto& c : channels) store<float>(out, static_cast<float>(c[t]));

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed: " + path.string());
}

}  // namespace drbss
