// camo/audio/wav_io.hpp

// Copyright 2026 The camo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>

#include "camo/audio/waveform.hpp"

namespace camo {

/// Where a loaded waveform came from and what was done to it on ingest.
struct IngestInfo {
  int original_sample_rate = kSampleRate;
  bool resampled = false;
};

/// Reads a mono 16-bit PCM little-endian RIFF/WAVE file. Files at other rates
/// are resampled to `target_rate` (pass 0 to keep the file's rate).
Waveform read_wav(const std::filesystem::path& path, IngestInfo* info = nullptr,
                  int target_rate = kSampleRate);

/// Writes mono 16-bit PCM. Samples are scaled by 32768 and saturated.
void write_wav(const std::filesystem::path& path, const Waveform& w);

/// Polyphase windowed-sinc rational resampler.
Waveform resample(const Waveform& w, int target_rate);

}  // namespace camo
