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

// Minimal RIFF/WAVE reader and writer. Writes 32-bit IEEE float; reads
// 16/24/32-bit PCM and 32/64-bit float, including WAVE_FORMAT_EXTENSIBLE.

#ifndef DRBSS_WAV_HPP_
#define DRBSS_WAV_HPP_

#include <filesystem>

#include "drbss/stft.hpp"

namespace drbss {

struct WavData {
  double sample_rate = 0.0;
  Signal channels;  // [M][S]
};

WavData read_wav(const std::filesystem::path& path);

/// Channels must have equal length; samples are stored as float32.
void write_wav(const std::filesystem::path& path, const Signal& channels, double sample_rate);

}  // namespace drbss

#endif  // DRBSS_WAV_HPP_
