// camo/data/dataset.hpp

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
#include <vector>

#include "camo/audio/waveform.hpp"

namespace camo {

struct Utterance {
  std::string id;
  Waveform audio;
  std::string transcript;  // normalized
  std::string speaker;
};

using Dataset = std::vector<Utterance>;

/// One JSON-lines record: {"audio_path", "transcript", "sample_rate"} plus
/// optional "split" and "id".
struct ManifestRecord {
  std::string audio_path;
  std::string transcript;
  int sample_rate = kSampleRate;
  std::string split;
  std::string id;
};

std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRecord>& records);

struct LoadReport {
  int loaded = 0;
  int skipped = 0;
  int resampled = 0;
  std::vector<std::string> warnings;
};

/// Loads the audio of every record (relative paths resolve against
/// `base_dir`), keeping records whose split matches `split` (empty = all).
/// Unreadable audio or non-normalizable transcripts are skipped and reported.
Dataset load_dataset(const std::vector<ManifestRecord>& records, const std::filesystem::path& base_dir,
                     const std::string& split = {}, LoadReport* report = nullptr);

/// Writes every utterance as WAV under `dir` and returns manifest records
/// (paths relative to `dir`).
std::vector<ManifestRecord> export_dataset(const Dataset& data, const std::filesystem::path& dir,
                                           const std::string& split);

}  // namespace camo
