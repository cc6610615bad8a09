// src/data/ingest.cpp

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

#include "camo/data/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "camo/asr/alphabet.hpp"
#include "camo/audio/wav_io.hpp"
#include "camo/core/error.hpp"

namespace fs = std::filesystem;

namespace camo {

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// Returns false (with a warning) when the audio cannot be decoded.
bool probe_audio(const fs::path& p, int& rate, IngestResult& out) {
  try {
    IngestInfo info;
    read_wav(p, &info, 0);
    rate = info.original_sample_rate;
    return true;
  } catch (const std::exception& e) {
    out.skipped++;
    out.warnings.push_back("skipping " + p.string() + ": " + e.what());
    return false;
  }
}

std::vector<fs::path> sorted_walk(const fs::path& root) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

void add_record(IngestResult& out, const fs::path& audio, const std::string& raw_text,
                const std::string& id, const std::string& split) {
  const auto text = normalize_text(raw_text);
  if (text.empty()) {
    out.skipped++;
    out.warnings.push_back("skipping " + audio.string() + ": empty transcript");
    return;
  }
  int rate = 0;
  if (!probe_audio(audio, rate, out)) return;
  out.records.push_back({fs::absolute(audio).string(), text, rate, split, id});
}

}  // namespace

CorpusLayout parse_layout(const std::string& name) {
  if (name == "flat") return CorpusLayout::kFlat;
  if (name == "librispeech") return CorpusLayout::kLibriSpeech;
  throw DomainError("unknown corpus layout '" + name + "' (expected flat|librispeech)");
}

IngestResult ingest_corpus(const fs::path& source_dir, CorpusLayout layout, const std::string& split) {
  if (!fs::is_directory(source_dir)) throw FormatError("'" + source_dir.string() + "' is not a directory");
  IngestResult out;
  const auto files = sorted_walk(source_dir);

  if (layout == CorpusLayout::kFlat) {
    for (const auto& f : files) {
      if (f.extension() != ".wav") continue;
      auto txt = f;
      txt.replace_extension(".txt");
      if (!fs::exists(txt)) {
        out.skipped++;
        out.warnings.push_back("skipping " + f.string() + ": no matching .txt");
        continue;
      }
      add_record(out, f, slurp(txt), f.stem().string(), split);
    }
  } else {
    for (const auto& f : files) {
      const auto name = f.filename().string();
      if (name.size() < 10 || name.substr(name.size() - 10) != ".trans.txt") continue;
      std::ifstream is(f);
      std::string line;
      while (std::getline(is, line)) {
        const auto sp = line.find(' ');
        if (sp == std::string::npos) continue;
        const auto id = line.substr(0, sp);
        const auto audio = f.parent_path() / (id + ".wav");
        if (!fs::exists(audio)) {
          out.skipped++;
          const auto flac = f.parent_path() / (id + ".flac");
          out.warnings.push_back("skipping " + id + (fs::exists(flac) ? ": FLAC audio must be converted to WAV"
                                                                        : ": audio file missing"));
          continue;
        }
        add_record(out, audio, line.substr(sp + 1), id, split);
      }
    }
  }
  if (out.records.empty())
    throw FormatError("ingest: zero records found under '" + source_dir.string() + "'");
  return out;
}

}  // namespace camo
