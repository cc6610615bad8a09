// camo/data/ingest.hpp

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

#include "camo/data/dataset.hpp"

namespace camo {

enum class CorpusLayout {
  /// `name.wav` next to `name.txt` anywhere below the root.
  kFlat,
  /// `<speaker>/<chapter>/<speaker>-<chapter>.trans.txt` with one
  /// `<utt-id> TRANSCRIPT` line per utterance and `<utt-id>.wav` audio.
  kLibriSpeech,
};

CorpusLayout parse_layout(const std::string& name);

struct IngestResult {
  std::vector<ManifestRecord> records;
  int skipped = 0;
  std::vector<std::string> warnings;
};

/// Walks `source_dir`, pairs audio with transcripts, normalizes text and
/// checks every WAV header. Record paths are absolute. Unreadable audio is
/// skipped with a warning; an empty result throws FormatError.
IngestResult ingest_corpus(const std::filesystem::path& source_dir, CorpusLayout layout,
                           const std::string& split = {});

}  // namespace camo
